"""Semidefinite programming: problem format and interior-point solver."""

from dipqrb.modules.sdp.schemas import (
    SdpProblem,
    SdpResiduals,
    SdpSolution,
    Sense,
    SolverOptions,
)
from dipqrb.modules.sdp.sdpa import read_sdpa, write_sdpa
from dipqrb.modules.sdp.solver import residuals, solve

__all__ = [
    "SdpProblem",
    "SdpResiduals",
    "SdpSolution",
    "Sense",
    "SolverOptions",
    "read_sdpa",
    "residuals",
    "solve",
    "write_sdpa",
]
