"""Behavior module: correlation tables, statistics and checks."""

from dipqrb.modules.behavior.io import read_behavior_csv, write_behavior_csv
from dipqrb.modules.behavior.schemas import (
    Behavior,
    CoarseStats,
    HeraldedBehavior,
    NoSignallingReport,
)
from dipqrb.modules.behavior.service import (
    check_no_signalling,
    coarse_grain,
    heralded,
    to_fully_di,
)
from dipqrb.modules.behavior.statistics import RoundStatistics, accumulate

__all__ = [
    "Behavior",
    "CoarseStats",
    "HeraldedBehavior",
    "NoSignallingReport",
    "RoundStatistics",
    "accumulate",
    "check_no_signalling",
    "coarse_grain",
    "heralded",
    "read_behavior_csv",
    "to_fully_di",
    "write_behavior_csv",
]
