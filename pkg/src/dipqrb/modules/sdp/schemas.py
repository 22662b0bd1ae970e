"""SDP problem and solution schemas.

Symmetric matrices are stored as atoms ``(p, q, c)`` meaning
``c * (E_pq + E_qp) / 2`` so that ``tr(A X) = sum(c * X[p, q])`` for
symmetric ``X``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from pydantic import BaseModel, Field

from dipqrb.contracts import SolverStatus
from dipqrb.exceptions import ValidationError
from dipqrb.settings import settings

Atom = tuple[int, int, float]


class Sense(str, Enum):
    """Optimization direction."""

    MAXIMIZE = "max"
    MINIMIZE = "min"


def atoms_from_dense(matrix: np.ndarray, tol: float = 1e-12) -> tuple[Atom, ...]:
    """Upper-triangular atoms of a symmetric matrix.

    Raises:
        ValidationError: If the matrix is not symmetric within ``tol``
    """
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValidationError(f"Expected a square matrix, got shape {matrix.shape}")
    if np.abs(matrix - matrix.T).max(initial=0.0) > tol:
        raise ValidationError("Matrix is not symmetric")

    rows, cols = np.nonzero(np.triu(matrix))
    return tuple(
        (int(p), int(q), float(matrix[p, q] if p == q else 2.0 * matrix[p, q]))
        for p, q in zip(rows, cols)
    )


def dense_from_atoms(atoms: tuple[Atom, ...], dimension: int) -> np.ndarray:
    matrix = np.zeros((dimension, dimension))
    for p, q, c in atoms:
        matrix[p, q] += c / 2.0
        matrix[q, p] += c / 2.0
    return matrix


@dataclass(frozen=True, eq=False)
class SdpProblem:
    """Standard-form SDP: optimize tr(C X) s.t. tr(A_i X) = b_i, X ⪰ 0.

    ``block_dims`` describes a block-diagonal X; atoms must stay inside
    one block.
    """

    block_dims: tuple[int, ...]
    objective: tuple[Atom, ...]
    constraints: tuple[tuple[Atom, ...], ...]
    rhs: np.ndarray
    sense: Sense = Sense.MAXIMIZE

    def __post_init__(self):
        dims = tuple(int(d) for d in self.block_dims)
        if not dims or min(dims) <= 0:
            raise ValidationError(f"Block dimensions must be positive, got {dims}")
        rhs = np.array(self.rhs, dtype=float).ravel()
        if len(self.constraints) < 1:
            raise ValidationError("At least one constraint is required")
        if len(rhs) != len(self.constraints):
            raise ValidationError(
                f"{len(self.constraints)} constraints but {len(rhs)} right-hand sides"
            )

        offsets = np.cumsum((0,) + dims)
        block_of = np.repeat(np.arange(len(dims)), dims)
        dimension = int(offsets[-1])

        def normalize(atoms) -> tuple[Atom, ...]:
            result = []
            for p, q, c in atoms:
                p, q = int(p), int(q)
                if not (0 <= p < dimension and 0 <= q < dimension):
                    raise ValidationError(f"Atom ({p}, {q}) outside dimension {dimension}")
                if block_of[p] != block_of[q]:
                    raise ValidationError(f"Atom ({p}, {q}) crosses a block boundary")
                result.append((min(p, q), max(p, q), float(c)))
            return tuple(result)

        rhs.setflags(write=False)
        object.__setattr__(self, "block_dims", dims)
        object.__setattr__(self, "rhs", rhs)
        object.__setattr__(self, "objective", normalize(self.objective))
        object.__setattr__(self, "constraints", tuple(normalize(c) for c in self.constraints))
        object.__setattr__(self, "sense", Sense(self.sense))

    @property
    def dimension(self) -> int:
        return sum(self.block_dims)

    @property
    def num_constraints(self) -> int:
        return len(self.constraints)

    def objective_matrix(self) -> np.ndarray:
        return dense_from_atoms(self.objective, self.dimension)

    def constraint_matrix(self, index: int) -> np.ndarray:
        return dense_from_atoms(self.constraints[index], self.dimension)

    def evaluate_constraints(self, X: np.ndarray) -> np.ndarray:
        """A(X) = (tr(A_i X))_i."""
        X = (X + X.T) / 2.0
        return np.array([sum(c * X[p, q] for p, q, c in atoms) for atoms in self.constraints])

    def adjoint(self, y: np.ndarray) -> np.ndarray:
        """Σ y_i A_i as a dense matrix."""
        matrix = np.zeros((self.dimension, self.dimension))
        for weight, atoms in zip(y, self.constraints):
            for p, q, c in atoms:
                matrix[p, q] += weight * c / 2.0
                matrix[q, p] += weight * c / 2.0
        return matrix

    @classmethod
    def from_dense(
        cls,
        objective: np.ndarray,
        constraints: list[np.ndarray],
        rhs: list[float] | np.ndarray,
        sense: Sense = Sense.MAXIMIZE,
        block_dims: tuple[int, ...] | None = None,
    ) -> SdpProblem:
        """Build from dense symmetric matrices."""
        dimension = np.asarray(objective).shape[0]
        return cls(
            block_dims=block_dims or (dimension,),
            objective=atoms_from_dense(objective),
            constraints=tuple(atoms_from_dense(a) for a in constraints),
            rhs=np.asarray(rhs, dtype=float),
            sense=sense,
        )


class SolverOptions(BaseModel):
    """Interior-point solver options."""

    gap_tol: float = Field(default_factory=lambda: settings.sdp_gap_tol, gt=0.0)
    feas_tol: float = Field(default_factory=lambda: settings.sdp_feas_tol, gt=0.0)
    max_iter: int = Field(default_factory=lambda: settings.sdp_max_iter, ge=1)
    step_fraction: float = Field(
        default_factory=lambda: settings.sdp_step_fraction, gt=0.0, lt=1.0
    )


@dataclass(frozen=True, eq=False)
class SdpSolution:
    """Primal-dual solution in the problem's own sense.

    For maximization, ``Z = Σ y_i A_i - C``; for minimization,
    ``Z = C - Σ y_i A_i``. Either way ``b·y`` bounds the optimum.
    """

    status: SolverStatus
    X: np.ndarray
    y: np.ndarray
    Z: np.ndarray
    primal_objective: float
    dual_objective: float
    iterations: int
    primal_infeasibility: float
    dual_infeasibility: float

    @property
    def gap(self) -> float:
        return abs(self.primal_objective - self.dual_objective)

    @property
    def is_optimal(self) -> bool:
        return self.status is SolverStatus.OPTIMAL

    def is_acceptable(self, tol: float = 1e-6) -> bool:
        """Optimal, or stopped early with gap and residuals below ``tol``."""
        if self.is_optimal:
            return True
        if self.status not in (SolverStatus.MAX_ITER, SolverStatus.NUMERICAL_FAILURE):
            return False
        return (
            self.gap <= tol * (1.0 + abs(self.primal_objective))
            and self.primal_infeasibility <= tol
            and self.dual_infeasibility <= tol
        )

    def certifies_dual_bound(self, tol: float = 1e-8) -> bool:
        """True when (y, Z) is dual feasible within ``tol``.

        ``b·y`` then bounds the optimum whatever happened to the primal
        iterate, so a stalled solve still yields a valid (looser) bound.
        """
        if self.status in (SolverStatus.INFEASIBLE_PRIMAL, SolverStatus.INFEASIBLE_DUAL):
            return False
        if not np.all(np.isfinite(self.Z)) or self.dual_infeasibility > tol:
            return False
        return float(np.linalg.eigvalsh((self.Z + self.Z.T) / 2.0)[0]) >= -tol


class SdpResiduals(BaseModel):
    """Independently recomputed optimality residuals."""

    primal_feas: float = Field(..., description="max |A(X) - b|")
    dual_feas: float = Field(..., description="max |dual slack equation residual|")
    gap: float = Field(..., description="|tr(C X) - b·y|")
