"""Coarse-graining, relabeling and consistency checks on behaviors."""

from __future__ import annotations

import logging

import numpy as np

from dipqrb.exceptions import UndefinedConditioningError
from dipqrb.modules.behavior.schemas import (
    Behavior,
    CoarseStats,
    HeraldedBehavior,
    NoSignallingReport,
)

logger = logging.getLogger(__name__)

# Merges ∅ (index 2) into outcome 0.
_MERGE_VOID = np.array([[1.0, 0.0, 1.0], [0.0, 1.0, 0.0]])


def _unit(value: float) -> float:
    return min(max(value, 0.0), 1.0)


def _conditional(numerator: float, denominator: float, event: str) -> float:
    if denominator <= 0.0:
        raise UndefinedConditioningError(f"Conditioning event has probability 0: {event}")
    return float(numerator / denominator)


def coarse_grain(behavior: Behavior) -> CoarseStats:
    """Compute the monitored statistics ω, Q_z and τ_z.

    Args:
        behavior: Behavior to summarize

    Returns:
        CoarseStats under the behavior's input distributions

    Raises:
        UndefinedConditioningError: If a conditioning event has probability 0
    """
    p_x = np.asarray(behavior.p_x)
    p_y = np.asarray(behavior.p_y)
    p_z = np.asarray(behavior.p_z)
    t0 = behavior.table0[:, :, :2, :2]
    t1 = behavior.table1

    win = np.zeros((2, 2, 2, 2))
    for x in range(2):
        for y in range(2):
            for a in range(2):
                win[x, y, a, a ^ (x * y)] = 1.0
    weights0 = np.einsum("x,y->xy", p_x, p_y)
    conclusive0 = float(np.einsum("xy,xyab->", weights0, t0))
    omega = _conditional(
        float(np.einsum("xy,xyab,xyab->", weights0, t0, win)),
        conclusive0,
        "s=0, A≠∅, B≠∅",
    )

    errors = []
    taus = []
    for z in range(2):
        matched = t1[z, z, :2, :2]
        errors.append(
            _conditional(
                float(matched[0, 1] + matched[1, 0]),
                float(matched.sum()),
                f"s=1, X=Z={z}, A≠∅, C≠∅",
            )
        )
        if p_z[z] <= 0.0:
            raise UndefinedConditioningError(f"Conditioning event has probability 0: s=1, Z={z}")
        taus.append(float(np.einsum("x,xac->", p_x, t1[:, z, :, :2])))

    heralding = float(np.einsum("x,z,xzac->", p_x, p_z, t1[:, :, :2, :]))

    return CoarseStats(
        omega=_unit(omega),
        q0=_unit(errors[0]),
        q1=_unit(errors[1]),
        tau0=_unit(taus[0]),
        tau1=_unit(taus[1]),
        heralding_rate=_unit(heralding),
    )


def to_fully_di(behavior: Behavior) -> Behavior:
    """Merge ∅ into outcome 0 for all parties.

    Behaviors that are already binary are returned unchanged.
    """
    if behavior.is_fully_di:
        return behavior

    def merge(table: np.ndarray) -> np.ndarray:
        return np.einsum("ia,jb,xyab->xyij", _MERGE_VOID, _MERGE_VOID, table)

    return Behavior(
        table0=merge(behavior.table0),
        table1=merge(behavior.table1),
        p_x=behavior.p_x,
        p_y=behavior.p_y,
        p_z=behavior.p_z,
        p_switch=behavior.p_switch,
    )


def check_no_signalling(behavior: Behavior, tol: float = 1e-6) -> NoSignallingReport:
    """Measure how much Alice's marginals depend on remote inputs.

    Args:
        behavior: Behavior to check
        tol: Pass threshold on every deviation

    Returns:
        NoSignallingReport with per-source maximum deviations
    """
    m0 = behavior.alice_marginal(0)
    m1 = behavior.alice_marginal(1)

    across_y = float(np.abs(m0[:, 0, :] - m0[:, 1, :]).max())
    across_z = float(np.abs(m1[:, 0, :] - m1[:, 1, :]).max())
    across_s = float(np.abs(m0[:, :, None, :] - m1[:, None, :, :]).max())

    report = NoSignallingReport(
        across_y=across_y,
        across_z=across_z,
        across_s=across_s,
        tol=tol,
        passed=max(across_y, across_z, across_s) < tol,
    )
    if not report.passed:
        logger.warning(f"No-signalling check failed: max deviation {report.max_deviation:.3e}")
    return report


def heralded(behavior: Behavior) -> HeraldedBehavior:
    """Post-select on Alice's click (and Bob's, for the s=0 route).

    Binary behaviors pass through with herald rate 1.

    Raises:
        UndefinedConditioningError: If a herald event has probability 0
    """
    if behavior.is_fully_di:
        return HeraldedBehavior(
            table0=behavior.table0,
            table1=behavior.table1,
            herald_rate=1.0,
            p_x=behavior.p_x,
            p_y=behavior.p_y,
            p_z=behavior.p_z,
            p_switch=behavior.p_switch,
        )

    t0 = behavior.table0[:, :, :2, :2]
    t1 = behavior.table1[:, :, :2, :]
    n0 = t0.sum(axis=(2, 3))
    n1 = t1.sum(axis=(2, 3))
    if (n0 <= 0).any():
        raise UndefinedConditioningError("Pr[A≠∅, B≠∅ | x, y] is 0 for some inputs")
    if (n1 <= 0).any():
        raise UndefinedConditioningError("Pr[A≠∅ | x, z] is 0 for some inputs")

    herald_rate = float(
        np.einsum("x,z,xz->", np.asarray(behavior.p_x), np.asarray(behavior.p_z), n1)
    )

    return HeraldedBehavior(
        table0=t0 / n0[:, :, None, None],
        table1=t1 / n1[:, :, None, None],
        herald_rate=herald_rate,
        p_x=behavior.p_x,
        p_y=behavior.p_y,
        p_z=behavior.p_z,
        p_switch=behavior.p_switch,
    )
