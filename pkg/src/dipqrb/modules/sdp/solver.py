"""Dense primal-dual interior-point SDP solver.

Infeasible-start path following with the HKM search direction and
Mehrotra predictor-corrector steps. The Schur complement is assembled from
constraint atoms and factorized with a dense Cholesky.
"""

from __future__ import annotations

import logging
import time

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from dipqrb.contracts import SolverStatus
from dipqrb.modules.sdp.schemas import (
    SdpProblem,
    SdpResiduals,
    SdpSolution,
    Sense,
    SolverOptions,
    dense_from_atoms,
)
from dipqrb.utils.observability import log_solve

logger = logging.getLogger(__name__)

# Iterate norms beyond this are read as divergence.
_DIVERGENCE = 1e12


def _sym(matrix: np.ndarray) -> np.ndarray:
    return (matrix + matrix.T) / 2.0


class _Operator:
    """Constraint map A and its adjoint over the distinct atom entries."""

    def __init__(self, problem: SdpProblem):
        entries: dict[tuple[int, int], int] = {}
        rows, cols, data = [], [], []
        for i, atoms in enumerate(problem.constraints):
            for p, q, c in atoms:
                j = entries.setdefault((p, q), len(entries))
                rows.append(i)
                cols.append(j)
                data.append(c)

        self.n = problem.dimension
        self.P = np.array([p for p, _ in entries], dtype=np.intp)
        self.Q = np.array([q for _, q in entries], dtype=np.intp)
        self.S = sp.csr_matrix(
            (data, (rows, cols)), shape=(problem.num_constraints, len(entries))
        )
        self.ST = self.S.T.tocsr()

    def apply(self, Y: np.ndarray) -> np.ndarray:
        """A(sym(Y))."""
        Y = _sym(Y)
        return self.S @ Y[self.P, self.Q]

    def adjoint(self, y: np.ndarray) -> np.ndarray:
        """Σ y_i A_i."""
        weights = (self.ST @ y) / 2.0
        matrix = np.zeros((self.n, self.n))
        np.add.at(matrix, (self.P, self.Q), weights)
        np.add.at(matrix, (self.Q, self.P), weights)
        return matrix

    def schur(self, X: np.ndarray, Zinv: np.ndarray) -> np.ndarray:
        """M_ij = tr(A_i X A_j Z⁻¹)."""
        P, Q = self.P, self.Q
        K = X[np.ix_(Q, P)] * Zinv[np.ix_(P, Q)]
        K += X[np.ix_(Q, Q)] * Zinv[np.ix_(P, P)]
        K += X[np.ix_(P, P)] * Zinv[np.ix_(Q, Q)]
        K += X[np.ix_(P, Q)] * Zinv[np.ix_(Q, P)]
        K *= 0.25
        M = self.S @ np.asarray(self.S @ K).T
        return _sym(np.asarray(M))


class _SchurSolver:
    """Cholesky of M with regularised and least-squares fallbacks."""

    def __init__(self, M: np.ndarray):
        self.M = M
        self.factor = None
        scale = max(float(np.abs(np.diag(M)).max(initial=0.0)), 1.0)
        for shift in (0.0, 1e-14 * scale, 1e-10 * scale):
            try:
                self.factor = sla.cho_factor(M + shift * np.eye(len(M)), lower=True)
                break
            except (np.linalg.LinAlgError, ValueError):
                continue
        if self.factor is None:
            logger.debug("Schur complement not positive definite; using least squares")

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        if self.factor is not None:
            return sla.cho_solve(self.factor, rhs)
        return np.linalg.lstsq(self.M, rhs, rcond=None)[0]


def _max_step(M: np.ndarray, dM: np.ndarray) -> float:
    """Largest α with M + α·dM ⪰ 0 (M ≻ 0)."""
    try:
        L = np.linalg.cholesky(M)
    except np.linalg.LinAlgError:
        return 0.0
    W = sla.solve_triangular(L, dM, lower=True)
    W = sla.solve_triangular(L, W.T, lower=True)
    smallest = float(np.linalg.eigvalsh(_sym(W))[0])
    return np.inf if smallest >= 0.0 else -1.0 / smallest


def _inverse(M: np.ndarray) -> np.ndarray:
    factor = sla.cho_factor(M, lower=True)
    return _sym(sla.cho_solve(factor, np.eye(len(M))))


def solve(problem: SdpProblem, opts: SolverOptions | None = None) -> SdpSolution:
    """Solve a standard-form SDP.

    Args:
        problem: Problem to solve
        opts: Tolerances and iteration limit (defaults from settings)

    Returns:
        SdpSolution; status ``optimal`` only when the gap and both
        residuals meet the tolerances
    """
    opts = opts or SolverOptions()
    start = time.perf_counter()
    solution = _solve_min_form(problem, opts)
    latency_ms = (time.perf_counter() - start) * 1000

    log_solve(
        dimension=problem.dimension,
        num_constraints=problem.num_constraints,
        status=solution.status.value,
        iterations=solution.iterations,
        gap=solution.gap,
        latency_ms=latency_ms,
    )
    return solution


def _solve_min_form(problem: SdpProblem, opts: SolverOptions) -> SdpSolution:
    maximize = problem.sense is Sense.MAXIMIZE
    n = problem.dimension
    b = problem.rhs
    C = dense_from_atoms(problem.objective, n)
    if maximize:
        C = -C
    op = _Operator(problem)

    tau = 1.0 + float(np.abs(b).max(initial=0.0))
    X = tau * np.eye(n)
    Z = tau * np.eye(n)
    y = np.zeros(problem.num_constraints)

    status = SolverStatus.MAX_ITER
    iterations = 0
    stalled = 0

    for iterations in range(1, opts.max_iter + 1):
        try:
            Zinv = _inverse(Z)
        except np.linalg.LinAlgError:
            status = SolverStatus.NUMERICAL_FAILURE
            break

        Rp = b - op.apply(X)
        Rd = C - Z - op.adjoint(y)
        primal = float(np.sum(C * X))
        dual = float(b @ y)
        pinf = float(np.abs(Rp).max(initial=0.0))
        dinf = float(np.abs(Rd).max(initial=0.0))
        mu = float(np.sum(X * Z)) / n

        if (
            abs(primal - dual) <= opts.gap_tol * (1.0 + abs(primal))
            and pinf <= opts.feas_tol
            and dinf <= opts.feas_tol
        ):
            status = SolverStatus.OPTIMAL
            break

        if np.abs(X).max() > _DIVERGENCE:
            status = SolverStatus.INFEASIBLE_DUAL
            break
        if np.abs(y).max(initial=0.0) > _DIVERGENCE or np.abs(Z).max() > _DIVERGENCE:
            status = SolverStatus.INFEASIBLE_PRIMAL
            break

        schur = _SchurSolver(op.schur(X, Zinv))
        XRdZinv = X @ Rd @ Zinv

        def direction(Rc: np.ndarray):
            rhs = Rp - op.apply(Rc) + op.apply(XRdZinv)
            dy = schur.solve(rhs)
            dZ = Rd - op.adjoint(dy)
            dX = Rc - _sym(X @ dZ @ Zinv)
            return dX, dy, _sym(dZ)

        # Predictor
        dX, dy, dZ = direction(-X)
        alpha_p = min(1.0, _max_step(X, dX))
        alpha_d = min(1.0, _max_step(Z, dZ))
        mu_aff = float(np.sum((X + alpha_p * dX) * (Z + alpha_d * dZ))) / n
        sigma = min(1.0, max(0.0, mu_aff / mu)) ** 3 if mu > 0 else 0.0

        # Corrector
        Rc = sigma * mu * Zinv - X - _sym(dX @ dZ @ Zinv)
        dX, dy, dZ = direction(Rc)
        alpha_p = min(1.0, opts.step_fraction * _max_step(X, dX))
        alpha_d = min(1.0, opts.step_fraction * _max_step(Z, dZ))

        if alpha_p < 1e-12 and alpha_d < 1e-12:
            stalled += 1
            if stalled >= 3:
                status = SolverStatus.NUMERICAL_FAILURE
                break
        else:
            stalled = 0

        X = _sym(X + alpha_p * dX)
        y = y + alpha_d * dy
        Z = _sym(Z + alpha_d * dZ)

        logger.debug(
            f"iter {iterations}: pobj={primal:.10g} dobj={dual:.10g} "
            f"pinf={pinf:.2e} dinf={dinf:.2e} mu={mu:.2e}"
        )

    Rp = b - op.apply(X)
    Rd = C - Z - op.adjoint(y)
    primal = float(np.sum(C * X))
    dual = float(b @ y)
    if maximize:
        primal, dual, y = -primal, -dual, -y

    return SdpSolution(
        status=status,
        X=X,
        y=y,
        Z=Z,
        primal_objective=primal,
        dual_objective=dual,
        iterations=iterations,
        primal_infeasibility=float(np.abs(Rp).max(initial=0.0)),
        dual_infeasibility=float(np.abs(Rd).max(initial=0.0)),
    )


def residuals(problem: SdpProblem, solution: SdpSolution) -> SdpResiduals:
    """Recompute feasibility and gap from the problem definition.

    Args:
        problem: Problem the solution belongs to
        solution: Candidate solution

    Returns:
        Primal and dual feasibility residuals (max-norm) and the gap
    """
    C = problem.objective_matrix()
    X = np.asarray(solution.X, dtype=float)
    y = np.asarray(solution.y, dtype=float)
    Z = np.asarray(solution.Z, dtype=float)

    primal_feas = float(np.abs(problem.evaluate_constraints(X) - problem.rhs).max())
    if problem.sense is Sense.MAXIMIZE:
        slack = problem.adjoint(y) - C - Z
    else:
        slack = C - problem.adjoint(y) - Z
    dual_feas = float(np.abs(slack).max(initial=0.0))
    gap = abs(float(np.sum(C * X)) - float(problem.rhs @ y))

    return SdpResiduals(primal_feas=primal_feas, dual_feas=dual_feas, gap=gap)
