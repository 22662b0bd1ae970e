"""Exact behavior of the photonic routed Bell test and samplers."""

from __future__ import annotations

import logging
from functools import lru_cache
from pathlib import Path

import numpy as np

from dipqrb.contracts import DoubleClickRule, Outcome
from dipqrb.exceptions import ValidationError
from dipqrb.modules.behavior import Behavior, write_behavior_csv
from dipqrb.modules.photonic_sim.schemas import OpticalModel, TwoQubitState

logger = logging.getLogger(__name__)

_VOID = int(Outcome.VOID)


def ideal_pair_state() -> TwoQubitState:
    """(|HH> + |VV>)/√2."""
    return TwoQubitState(np.array([1.0, 0.0, 0.0, 1.0], dtype=complex) / np.sqrt(2))


def measurement_effects(
    angle_degrees: float,
    eta: float,
    double_click_rule: DoubleClickRule = DoubleClickRule.RANDOM_BIT,
) -> list[np.ndarray]:
    """POVM of a lossy rotated polarization measurement.

    Outcome 0 projects onto |θ>, outcome 1 onto |θ+90°>, each scaled by
    eta; the remaining (1 - eta)·I is the no-click effect. A single photon
    never fires both detectors, so ``double_click_rule`` leaves the
    effects unchanged.

    Args:
        angle_degrees: Rotation angle θ
        eta: Detection efficiency
        double_click_rule: Squashing rule for simultaneous clicks

    Returns:
        Effects for outcomes 0, 1 and ∅ (2×2 complex matrices)

    Raises:
        ValidationError: If eta is outside [0, 1]
    """
    if not 0.0 <= eta <= 1.0:
        raise ValidationError(f"eta must lie in [0, 1], got {eta}")

    theta = np.deg2rad(angle_degrees)
    parallel = np.array([np.cos(theta), np.sin(theta)], dtype=complex)
    orthogonal = np.array([-np.sin(theta), np.cos(theta)], dtype=complex)

    return [
        eta * np.outer(parallel, parallel.conj()),
        eta * np.outer(orthogonal, orthogonal.conj()),
        (1.0 - eta) * np.eye(2, dtype=complex),
    ]


def _joint_table(
    state: TwoQubitState,
    angles_first: tuple[float, float],
    eta_first: float,
    angles_second: tuple[float, float],
    eta_second: float,
    rule: DoubleClickRule,
) -> np.ndarray:
    psi = state.coefficients
    table = np.zeros((2, 2, 3, 3))
    for u, angle_u in enumerate(angles_first):
        first = measurement_effects(angle_u, eta_first, rule)
        for v, angle_v in enumerate(angles_second):
            second = measurement_effects(angle_v, eta_second, rule)
            for i, effect_i in enumerate(first):
                for j, effect_j in enumerate(second):
                    table[u, v, i, j] = np.vdot(psi, np.kron(effect_i, effect_j) @ psi).real
    return np.clip(table, 0.0, 1.0)


@lru_cache(maxsize=256)
def exact_behavior(model: OpticalModel) -> Behavior:
    """Closed-form outcome tables for both switch settings.

    Results are cached per model; the model is immutable.
    """
    state = ideal_pair_state()
    rule = model.double_click_rule
    table0 = _joint_table(state, model.angles_a, model.eta_a, model.angles_b, model.eta_b, rule)
    table1 = _joint_table(state, model.angles_a, model.eta_a, model.angles_c, model.eta_c, rule)

    logger.debug(f"Computed exact behavior for eta_c={model.eta_c}")
    return Behavior(
        table0=table0,
        table1=table1,
        p_x=model.p_x,
        p_y=model.p_y,
        p_z=model.p_z,
        p_switch=model.p_switch,
    )


def _draw(rng: np.random.Generator, probabilities: np.ndarray) -> int:
    cumulative = np.cumsum(probabilities)
    index = int(np.searchsorted(cumulative, rng.random() * cumulative[-1], side="right"))
    return min(index, len(probabilities) - 1)


def sample_round(
    model: OpticalModel,
    rng: np.random.Generator,
    s: int,
    x: int,
    y: int,
    z: int,
) -> tuple[Outcome, Outcome, Outcome]:
    """Draw (a, b, c) from the exact joint table for one round.

    The unrouted party is blanked: b=∅ when s=1 and c=∅ when s=0.
    """
    behavior = exact_behavior(model)
    if s == 0:
        index = _draw(rng, behavior.table0[x, y].ravel())
        a, b = divmod(index, 3)
        return Outcome(a), Outcome(b), Outcome.VOID

    index = _draw(rng, behavior.table1[x, z].ravel())
    a, c = divmod(index, 3)
    return Outcome(a), Outcome.VOID, Outcome(c)


def sample_rounds(
    model: OpticalModel,
    rng: np.random.Generator,
    s: np.ndarray,
    x: np.ndarray,
    y: np.ndarray,
    z: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorised :func:`sample_round` over input arrays.

    Returns:
        Integer arrays a, b, c with ∅ encoded as 2
    """
    behavior = exact_behavior(model)
    s, x, y, z = (np.asarray(v, dtype=np.intp) for v in (s, x, y, z))
    cdf0 = np.cumsum(behavior.table0.reshape(2, 2, 9), axis=-1)
    cdf1 = np.cumsum(behavior.table1.reshape(2, 2, 9), axis=-1)

    rows = np.where((s == 0)[:, None], cdf0[x, y], cdf1[x, z])
    u = rng.random(len(s)) * rows[:, -1]
    index = np.minimum((u[:, None] >= rows).sum(axis=1), 8)

    a, other = np.divmod(index, 3)
    b = np.where(s == 0, other, _VOID)
    c = np.where(s == 1, other, _VOID)
    return a, b, c


def alice_marginal(model: OpticalModel, x: int) -> np.ndarray:
    """p(a|x); identical for both routes in the single-pair model."""
    return exact_behavior(model).table1[x, 0].sum(axis=1)


def sample_server_outcomes(
    model: OpticalModel,
    rng: np.random.Generator,
    s: int,
    x: int,
    y: int,
) -> tuple[Outcome, Outcome]:
    """Server side of a round: (a, b), with b=∅ when routed to the client."""
    behavior = exact_behavior(model)
    if s == 0:
        a, b = divmod(_draw(rng, behavior.table0[x, y].ravel()), 3)
        return Outcome(a), Outcome(b)
    return Outcome(_draw(rng, alice_marginal(model, x))), Outcome.VOID


def sample_client_outcome(
    model: OpticalModel,
    rng: np.random.Generator,
    x: int,
    z: int,
    a: Outcome,
    merge_void: bool = False,
) -> Outcome:
    """Client outcome c from p(c | a, x, z) after the server announcement.

    Combined with :func:`sample_server_outcomes` this reproduces the joint
    s=1 table because Alice's marginal does not depend on z. With
    ``merge_void`` the announced ``a`` has ∅ already merged into 0 and the
    returned c is merged the same way.
    """
    table = exact_behavior(model).table1[x, z]
    if merge_void:
        row = table[0] + table[2] if a is Outcome.ZERO else table[int(a)]
    else:
        row = table[int(a)]
    if row.sum() <= 0.0:
        raise ValidationError(f"Outcome a={a.label} has probability 0 for x={x}, z={z}")
    c = Outcome(_draw(rng, row))
    if merge_void and c is Outcome.VOID:
        return Outcome.ZERO
    return c


def dump_behavior_csv(model: OpticalModel, path: str | Path) -> None:
    """Write the exact table for ``model`` as CSV."""
    write_behavior_csv(exact_behavior(model), path)
