"""Shared schemas and enums.

Centralizing contracts keeps the simulator, certifier, protocol
and wire layers consistent.
"""

from dipqrb.contracts.common import (
    SCORES,
    AbortReason,
    ConstraintMode,
    DoubleClickRule,
    Mode,
    Outcome,
    Score,
    SessionStatus,
    SolverStatus,
)
from dipqrb.contracts.records import RoundAnnouncement, RoundRecord

__all__ = [
    "RoundAnnouncement",
    "RoundRecord",
    "SCORES",
    "AbortReason",
    "ConstraintMode",
    "DoubleClickRule",
    "Mode",
    "Outcome",
    "Score",
    "SessionStatus",
    "SolverStatus",
]
