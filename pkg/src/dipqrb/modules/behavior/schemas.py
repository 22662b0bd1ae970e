"""Behavior module schemas."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from dipqrb.exceptions import ValidationError

Pair = tuple[float, float]


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Behavior:
    """Conditional outcome tables of the routed Bell test.

    ``table0[x, y, a, b]`` holds p(ab|xy, s=0) and ``table1[x, z, a, c]``
    holds p(ac|xz, s=1). Outcome axes have size 3 (index 2 is ∅) or 2 once
    ∅ has been merged into 0.
    """

    table0: np.ndarray
    table1: np.ndarray
    p_x: Pair = (0.5, 0.5)
    p_y: Pair = (0.5, 0.5)
    p_z: Pair = (0.5, 0.5)
    p_switch: float = 0.5

    def __post_init__(self):
        table0 = _frozen(self.table0)
        table1 = _frozen(self.table1)
        k = table0.shape[-1]
        if k not in (2, 3) or table0.shape != (2, 2, k, k) or table1.shape != (2, 2, k, k):
            raise ValidationError(
                f"Tables must have shape (2, 2, k, k) with k in (2, 3), "
                f"got {table0.shape} and {table1.shape}"
            )
        for name, table in (("table0", table0), ("table1", table1)):
            if table.min() < -1e-12 or table.max() > 1 + 1e-12:
                raise ValidationError(f"{name} has entries outside [0, 1]")
            sums = table.sum(axis=(2, 3))
            if np.abs(sums - 1.0).max() > 1e-9:
                raise ValidationError(f"{name} conditionals do not sum to 1: {sums.tolist()}")
        if not 0.0 < self.p_switch < 1.0:
            raise ValidationError(f"p_switch must lie in (0, 1), got {self.p_switch}")

        object.__setattr__(self, "table0", table0)
        object.__setattr__(self, "table1", table1)
        object.__setattr__(self, "p_x", tuple(float(v) for v in self.p_x))
        object.__setattr__(self, "p_y", tuple(float(v) for v in self.p_y))
        object.__setattr__(self, "p_z", tuple(float(v) for v in self.p_z))

    @property
    def num_outcomes(self) -> int:
        return self.table0.shape[-1]

    @property
    def is_fully_di(self) -> bool:
        return self.num_outcomes == 2

    def alice_marginal(self, switch: int) -> np.ndarray:
        """p(a|x) per remote input, shape (2, 2, k) indexed [x, remote, a]."""
        table = self.table0 if switch == 0 else self.table1
        return table.sum(axis=3)


@dataclass(frozen=True, eq=False)
class HeraldedBehavior:
    """Behavior post-selected on Alice's click (fair sampling).

    ``table0`` is conditioned on A≠∅ and B≠∅ (binary A and B),
    ``table1`` on A≠∅ (binary A, C keeps its alphabet).
    """

    table0: np.ndarray
    table1: np.ndarray
    herald_rate: float
    p_x: Pair
    p_y: Pair
    p_z: Pair
    p_switch: float

    def __post_init__(self):
        object.__setattr__(self, "table0", _frozen(self.table0))
        object.__setattr__(self, "table1", _frozen(self.table1))

    @property
    def client_outcomes(self) -> int:
        return self.table1.shape[-1]


class CoarseStats(BaseModel):
    """Coarse-grained monitored statistics."""

    model_config = ConfigDict(frozen=True)

    omega: float = Field(..., ge=0.0, le=1.0, description="CHSH winning probability")
    q0: float = Field(..., ge=0.0, le=1.0, description="Error rate for z=0")
    q1: float = Field(..., ge=0.0, le=1.0, description="Error rate for z=1")
    tau0: float = Field(..., ge=0.0, le=1.0, description="Transmittivity for z=0")
    tau1: float = Field(..., ge=0.0, le=1.0, description="Transmittivity for z=1")
    heralding_rate: float = Field(..., ge=0.0, le=1.0, description="Pr[A≠∅]")


class NoSignallingReport(BaseModel):
    """Maximum deviations of Alice's marginals."""

    across_y: float = Field(..., description="Across Bob's input (s=0)")
    across_z: float = Field(..., description="Across Charlie's input (s=1)")
    across_s: float = Field(..., description="Between the two routes")
    tol: float
    passed: bool

    @property
    def max_deviation(self) -> float:
        return max(self.across_y, self.across_z, self.across_s)
