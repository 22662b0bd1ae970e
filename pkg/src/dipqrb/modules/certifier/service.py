"""Entropy bounds, min-tradeoff functions and asymptotic rates."""

from __future__ import annotations

import logging
import math
from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np

from dipqrb.contracts import SCORES, ConstraintMode, Mode, Score
from dipqrb.exceptions import InfeasibleAcceptedSetError, ValidationError
from dipqrb.modules.behavior import Behavior, to_fully_di
from dipqrb.modules.certifier.program import effective_behavior, guessing_probability
from dipqrb.modules.certifier.schemas import (
    AcceptedSet,
    GuessingProgramSpec,
    MinTradeoff,
)
from dipqrb.modules.sdp import SolverOptions

logger = logging.getLogger(__name__)

_BASIS_SCORES = (
    (Score.AGREE_0, Score.ERROR_0, Score.CLIENT_NOCLICK_0),
    (Score.AGREE_1, Score.ERROR_1, Score.CLIENT_NOCLICK_1),
)


def min_entropy_rate(pg_upper: float, p_gen: float) -> float:
    """Per-round entropy p_gen · (-log2 pg_upper), clipped below at 0.

    Values of ``pg_upper`` marginally above 1 (solver tolerance) count as 1.

    Raises:
        ValidationError: If pg_upper ≤ 0 or p_gen is outside [0, 1]
    """
    if pg_upper <= 0.0:
        raise ValidationError(f"pg_upper must be positive, got {pg_upper}")
    if not 0.0 <= p_gen <= 1.0:
        raise ValidationError(f"p_gen must lie in [0, 1], got {p_gen}")
    return max(0.0, -p_gen * math.log2(min(pg_upper, 1.0)))


@dataclass(frozen=True)
class TangentLine:
    """Tangent of -log2 p at ``p0``; lies below the curve on (0, 1]."""

    p0: float

    def __post_init__(self):
        if not 0.0 < self.p0 <= 1.0:
            raise ValidationError(f"Tangent point must lie in (0, 1], got {self.p0}")

    @property
    def slope(self) -> float:
        return -1.0 / (self.p0 * math.log(2.0))

    @property
    def intercept(self) -> float:
        return -math.log2(self.p0) + 1.0 / math.log(2.0)

    def __call__(self, p: float) -> float:
        return self.intercept + self.slope * p


def tangent_bound(p0: float) -> TangentLine:
    """g(p) = -log2 p0 - (p - p0) / (p0 ln 2).

    Raises:
        ValidationError: If p0 is outside (0, 1]
    """
    return TangentLine(p0)


def _scoring_behavior(behavior: Behavior, mode: Mode) -> Behavior:
    return to_fully_di(behavior) if mode is Mode.FULLY_DI else behavior


def honest_score_distribution(
    behavior: Behavior,
    gamma: float,
    mode: Mode = Mode.SEMI_DI,
    gamma_route1: float | None = None,
) -> dict[Score, float]:
    """Expected per-round score distribution of an honest run.

    Args:
        behavior: Behavior driving the rounds
        gamma: Test-round probability
        mode: In fully-DI mode ∅ is merged into 0 before scoring
        gamma_route1: Test-round probability for S=1 rounds (defaults to gamma)

    Returns:
        Probability of every score symbol

    Raises:
        ValidationError: If gamma is outside [0, 1]
    """
    gamma_route1 = gamma if gamma_route1 is None else gamma_route1
    for value in (gamma, gamma_route1):
        if not 0.0 <= value <= 1.0:
            raise ValidationError(f"gamma must lie in [0, 1], got {value}")

    behavior = _scoring_behavior(behavior, mode)
    p_x = np.asarray(behavior.p_x)
    p_y = np.asarray(behavior.p_y)
    p_z = np.asarray(behavior.p_z)
    ps = behavior.p_switch
    t0 = behavior.table0
    t1 = behavior.table1

    q = dict.fromkeys(SCORES, 0.0)
    q[Score.BOT] = 1.0 - gamma * (1.0 - ps) - gamma_route1 * ps

    test0 = gamma * (1.0 - ps)
    for x in range(2):
        for y in range(2):
            weight = test0 * p_x[x] * p_y[y]
            conclusive = t0[x, y, :2, :2]
            win = sum(conclusive[a, a ^ (x * y)] for a in range(2))
            q[Score.CHSH_WIN] += weight * win
            q[Score.CHSH_LOSS] += weight * (conclusive.sum() - win)
            q[Score.SERVER_NOCLICK] += weight * (1.0 - conclusive.sum())

    test1 = gamma_route1 * ps
    for x in range(2):
        for z in range(2):
            weight = test1 * p_x[x] * p_z[z]
            clicked = t1[x, z, :2, :]
            q[Score.SERVER_NOCLICK] += weight * (1.0 - clicked.sum())
            if x != z:
                q[Score.OFFBASIS] += weight * clicked.sum()
                continue
            agree, error, noclick = _BASIS_SCORES[z]
            q[agree] += weight * (clicked[0, 0] + clicked[1, 1])
            q[error] += weight * (clicked[0, 1] + clicked[1, 0])
            if clicked.shape[1] == 3:
                q[noclick] += weight * clicked[:, 2].sum()

    return {score: float(value) for score, value in q.items()}


def honest_accepted_set(
    q: Mapping[Score, float], n: int, sigmas: float = 4.0, slack: float = 0.0
) -> AcceptedSet:
    """Box of ±sigmas binomial standard deviations around ``q``.

    Args:
        q: Expected score distribution
        n: Number of rounds
        sigmas: Half-width in standard deviations
        slack: Extra absolute half-width
    """
    if n < 1:
        raise ValidationError(f"n must be positive, got {n}")
    intervals = {}
    for score in SCORES:
        p = float(q.get(score, 0.0))
        half = sigmas * math.sqrt(max(p * (1.0 - p), 0.0) / n) + slack
        intervals[score] = (max(0.0, p - half), min(1.0, p + half))
    return AcceptedSet(intervals=intervals)


def _normalizers(behavior: Behavior, gamma: float, gamma_route1: float) -> dict[str, float]:
    p_x = np.asarray(behavior.p_x)
    p_y = np.asarray(behavior.p_y)
    p_z = np.asarray(behavior.p_z)
    ps = behavior.p_switch
    both_click = behavior.table0[:, :, :2, :2].sum(axis=(2, 3))
    alice_click = behavior.table1[:, :, :2, :].sum(axis=(2, 3))

    normalizers = {
        "omega": gamma * (1.0 - ps) * float(np.einsum("x,y,xy->", p_x, p_y, both_click))
    }
    for z in range(2):
        normalizers[f"basis{z}"] = gamma_route1 * ps * p_x[z] * p_z[z] * float(alice_click[z, z])
    for name, value in normalizers.items():
        if value <= 0.0:
            raise ValidationError(f"Monitored statistic {name} is never observed")
    return {name: float(value) for name, value in normalizers.items()}


def build_min_tradeoff(
    spec: GuessingProgramSpec,
    gamma: float,
    p0: float | None = None,
    opts: SolverOptions | None = None,
    gamma_route1: float | None = None,
) -> MinTradeoff:
    """Affine min-tradeoff function over the score alphabet.

    Solves the coarse-grained program at ``spec.behavior``, reads the
    dual certificate as an affine bound on P_g in the monitored statistics,
    rewrites those statistics as linear functions of the score frequencies
    and composes with the tangent of -log2 at ``p0``.

    Args:
        spec: Program inputs (its constraint mode is overridden)
        gamma: Test-round probability used by the protocol
        p0: Tangent point; defaults to the solved pg_upper
        opts: Solver options
        gamma_route1: Test-round probability for S=1 rounds (defaults to gamma)

    Returns:
        MinTradeoff with a zero coefficient on ⊥

    Raises:
        ValidationError: If gamma is outside (0, 1] or p0 outside (0, 1]
        SolverError: If the coarse program cannot be solved
    """
    gamma_route1 = gamma if gamma_route1 is None else gamma_route1
    for value in (gamma, gamma_route1):
        if not 0.0 < value <= 1.0:
            raise ValidationError(f"gamma must lie in (0, 1], got {value}")

    coarse_spec = spec.replace(constraint_mode=ConstraintMode.COARSE_GRAINED)
    result = guessing_probability(coarse_spec, opts)
    tangent = tangent_bound(result.pg_upper if p0 is None else p0)

    normalizers = _normalizers(effective_behavior(spec), gamma, gamma_route1)
    dual = result.dual_certificate

    per_score = dict.fromkeys(SCORES, 0.0)
    per_score[Score.CHSH_WIN] = dual["omega"] / normalizers["omega"]
    for z, (agree, error, _) in enumerate(_BASIS_SCORES):
        norm = normalizers[f"basis{z}"]
        per_score[error] = (dual[f"error{z}"] + dual[f"tau{z}"]) / norm
        per_score[agree] = dual[f"tau{z}"] / norm

    scale = result.p_gen * tangent.slope
    tradeoff = MinTradeoff(
        coefficients={score: scale * value for score, value in per_score.items()},
        constant=result.p_gen * (tangent.intercept + tangent.slope * result.certificate_constant),
        p0=tangent.p0,
        p_gen=result.p_gen,
        herald_rate=result.herald_rate,
        pg_upper=result.pg_upper,
        normalizers=normalizers,
    )
    logger.info(
        f"Min-tradeoff built at p0={tangent.p0:.6f}: "
        f"constant={tradeoff.constant:.6f}, p_gen={result.p_gen:.6f}"
    )
    return tradeoff


def asymptotic_rate(f: MinTradeoff, acc: AcceptedSet) -> float:
    """h* = min f(q) over distributions inside the accepted box.

    The box-with-simplex LP is solved greedily: start every score at its
    lower bound and hand the remaining mass to the smallest coefficients.

    Raises:
        InfeasibleAcceptedSetError: If no distribution fits the intervals
    """
    if not acc.is_feasible:
        raise InfeasibleAcceptedSetError("Accepted set contains no probability distribution")

    q = {score: acc.bounds(score)[0] for score in SCORES}
    remaining = 1.0 - sum(q.values())
    for score in sorted(SCORES, key=lambda s: f.coefficients.get(s, 0.0)):
        if remaining <= 0.0:
            break
        lo, hi = acc.bounds(score)
        add = min(hi - lo, remaining)
        q[score] += add
        remaining -= add
    return f.evaluate(q)
