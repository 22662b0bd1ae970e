"""Certifier schemas."""

from __future__ import annotations

import dataclasses
import math
from collections.abc import Mapping
from dataclasses import dataclass, field

from pydantic import BaseModel, Field, field_validator

from dipqrb.contracts import SCORES, ConstraintMode, Mode, Score, SolverStatus
from dipqrb.exceptions import ValidationError
from dipqrb.modules.behavior import Behavior, CoarseStats
from dipqrb.settings import settings


@dataclass(frozen=True, eq=False)
class GuessingProgramSpec:
    """Inputs of one guessing-probability program.

    Input distributions and ``p_switch`` come from the behavior. The
    generation event is S=1 and Z≠X (and A≠∅ in semi-DI mode).
    ``coarse_stats`` overrides the monitored statistics in coarse mode.
    """

    behavior: Behavior
    constraint_mode: ConstraintMode = ConstraintMode.FULL_DISTRIBUTION
    mode: Mode = Mode.SEMI_DI
    coarse_stats: CoarseStats | None = None
    level: int = field(default_factory=lambda: settings.npa_level)
    extras: tuple[str, ...] = field(default_factory=lambda: tuple(settings.npa_extras))

    def __post_init__(self):
        if self.level < 1:
            raise ValidationError(f"Hierarchy level must be at least 1, got {self.level}")
        object.__setattr__(self, "constraint_mode", ConstraintMode(self.constraint_mode))
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "extras", tuple(self.extras))

    def replace(self, **changes) -> GuessingProgramSpec:
        return dataclasses.replace(self, **changes)


class GuessingResult(BaseModel):
    """Solved guessing program with its dual certificate.

    ``pg_upper ≤ certificate_constant + Σ dual_certificate[k] · v_k`` for any
    constraint values v, with equality (up to the gap) at the solved values.
    """

    pg_upper: float = Field(..., description="Certified upper bound on P_g")
    primal_value: float
    status: SolverStatus
    gap: float
    iterations: int
    certificate_constant: float
    dual_certificate: dict[str, float]
    constraint_values: dict[str, float]
    p_gen: float = Field(..., description="Pr[S=1, Z≠X, A≠∅]")
    herald_rate: float = Field(..., description="Pr[A≠∅]")


class MinTradeoff(BaseModel):
    """Affine function of the score distribution bounding single-round entropy."""

    coefficients: dict[Score, float]
    constant: float
    p0: float = Field(..., gt=0.0, le=1.0, description="Tangent point")
    p_gen: float
    herald_rate: float = 1.0
    pg_upper: float
    normalizers: dict[str, float] = Field(default_factory=dict)

    def evaluate(self, frequencies: Mapping[Score, float]) -> float:
        """f(q) = constant + Σ_d f_d q_d; missing scores count as 0."""
        return self.constant + sum(
            self.coefficients.get(score, 0.0) * float(frequencies.get(score, 0.0))
            for score in SCORES
        )

    def statistics(self, frequencies: Mapping[Score, float]) -> dict[str, float]:
        """Monitored statistics read from frequencies with the fixed normalizers."""
        q = {score: float(frequencies.get(score, 0.0)) for score in SCORES}
        stats = {"omega": q[Score.CHSH_WIN] / self.normalizers["omega"]}
        for z, (agree, error) in enumerate(
            ((Score.AGREE_0, Score.ERROR_0), (Score.AGREE_1, Score.ERROR_1))
        ):
            norm = self.normalizers[f"basis{z}"]
            stats[f"error{z}"] = q[error] / norm
            stats[f"tau{z}"] = (q[agree] + q[error]) / norm
        return stats


class AcceptedSet(BaseModel):
    """Per-score frequency intervals; unlisted scores range over [0, 1]."""

    intervals: dict[Score, tuple[float, float]]

    @field_validator("intervals")
    @classmethod
    def check_intervals(cls, value):
        for score, (lo, hi) in value.items():
            if not 0.0 <= lo <= hi <= 1.0:
                raise ValueError(f"Interval for {score.value} must satisfy 0 ≤ lo ≤ hi ≤ 1")
        return value

    def bounds(self, score: Score) -> tuple[float, float]:
        return self.intervals.get(score, (0.0, 1.0))

    @property
    def is_feasible(self) -> bool:
        lows = sum(self.bounds(s)[0] for s in SCORES)
        highs = sum(self.bounds(s)[1] for s in SCORES)
        return lows <= 1.0 + 1e-12 and highs >= 1.0 - 1e-12

    def contains(self, frequencies: Mapping[Score, float]) -> bool:
        return all(
            self.bounds(s)[0] <= float(frequencies.get(s, 0.0)) <= self.bounds(s)[1]
            for s in SCORES
        )

    def widened(self, slack: float) -> AcceptedSet:
        return AcceptedSet(
            intervals={
                s: (max(0.0, lo - slack), min(1.0, hi + slack))
                for s, (lo, hi) in self.intervals.items()
            }
        )


class ScanPoint(BaseModel):
    """One row of a rate scan."""

    eta_c: float
    pg_upper: float = math.nan
    p_gen: float = math.nan
    rate_per_heralded_event: float = math.nan
    solver_status: str
    gap: float = math.nan
