"""Certification: guessing programs, entropy bounds and rate scans."""

from dipqrb.modules.certifier.program import (
    build_guessing_program,
    coarse_values,
    generation_weights,
    guessing_probability,
)
from dipqrb.modules.certifier.scan import (
    SCAN_COLUMNS,
    rate_scan,
    save_scan_csv,
    write_scan_csv,
)
from dipqrb.modules.certifier.schemas import (
    AcceptedSet,
    GuessingProgramSpec,
    GuessingResult,
    MinTradeoff,
    ScanPoint,
)
from dipqrb.modules.certifier.service import (
    TangentLine,
    asymptotic_rate,
    build_min_tradeoff,
    honest_accepted_set,
    honest_score_distribution,
    min_entropy_rate,
    tangent_bound,
)

__all__ = [
    "SCAN_COLUMNS",
    "AcceptedSet",
    "GuessingProgramSpec",
    "GuessingResult",
    "MinTradeoff",
    "ScanPoint",
    "TangentLine",
    "asymptotic_rate",
    "build_guessing_program",
    "build_min_tradeoff",
    "coarse_values",
    "generation_weights",
    "guessing_probability",
    "honest_accepted_set",
    "honest_score_distribution",
    "min_entropy_rate",
    "rate_scan",
    "save_scan_csv",
    "tangent_bound",
    "write_scan_csv",
]
