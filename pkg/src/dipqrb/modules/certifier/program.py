"""Guessing-probability moment programs."""

from __future__ import annotations

import itertools
import logging

import numpy as np

from dipqrb.contracts import ConstraintMode, Mode
from dipqrb.exceptions import NoSignallingError, SolverError, ValidationError
from dipqrb.modules.behavior import (
    Behavior,
    HeraldedBehavior,
    check_no_signalling,
    heralded,
    to_fully_di,
)
from dipqrb.modules.certifier.schemas import GuessingProgramSpec, GuessingResult
from dipqrb.modules.npa import (
    MomentConstraint,
    MomentRelaxation,
    Polynomial,
    Scenario,
    build_moment_sdp,
    generate_monomials,
    projector,
)
from dipqrb.modules.sdp import Sense, SolverOptions, solve
from dipqrb.settings import settings

logger = logging.getLogger(__name__)

COARSE_NAMES = ("omega", "error0", "error1", "tau0", "tau1")


def effective_behavior(spec: GuessingProgramSpec) -> Behavior:
    """The behavior the program is built from (∅ merged in fully-DI mode)."""
    if spec.mode is Mode.FULLY_DI:
        return to_fully_di(spec.behavior)
    return spec.behavior


def generation_weights(p_x, p_z) -> np.ndarray:
    """Pr[x, z | Z≠X] as a 2×2 array with a zero diagonal.

    Raises:
        ValidationError: If Pr[Z≠X] is 0
    """
    joint = np.outer(np.asarray(p_x, dtype=float), np.asarray(p_z, dtype=float))
    np.fill_diagonal(joint, 0.0)
    total = joint.sum()
    if total <= 0.0:
        raise ValidationError("Generation event Z≠X has probability 0")
    return joint / total


def generation_probability(behavior: Behavior, herald_rate: float) -> float:
    """p_gen = Pr[S=1] · Pr[Z≠X] · Pr[A≠∅]."""
    joint = np.outer(np.asarray(behavior.p_x), np.asarray(behavior.p_z))
    off_diagonal = float(joint.sum() - np.trace(joint))
    return behavior.p_switch * off_diagonal * herald_rate


def guessing_scenario(client_outcomes: int) -> Scenario:
    """Routed scenario with adversary guesses only where Z≠X."""
    contexts = [
        (a, x, z) for a, x, z in itertools.product(range(2), range(2), range(2)) if x != z
    ]
    return Scenario.routed(c_outcomes=client_outcomes, e_contexts=contexts)


def guessing_objective(scenario: Scenario, weights: np.ndarray, client_outcomes: int) -> Polynomial:
    objective = Polynomial()
    for x, z in itertools.product(range(2), range(2)):
        if weights[x, z] == 0.0:
            continue
        for a, c in itertools.product(range(2), range(client_outcomes)):
            term = (
                projector(scenario, "A", (x,), a)
                * projector(scenario, "C", (z,), c)
                * projector(scenario, "E", (a, x, z), c)
            )
            objective = objective + float(weights[x, z]) * term
    return objective


def _full_constraints(scenario: Scenario, herald: HeraldedBehavior) -> list[MomentConstraint]:
    p_x = np.asarray(herald.p_x)
    p_y = np.asarray(herald.p_y)
    p_z = np.asarray(herald.p_z)
    t0 = herald.table0
    t1 = herald.table1
    k = herald.client_outcomes

    def op(party: str, setting: int, outcome: int) -> Polynomial:
        return projector(scenario, party, (setting,), outcome)

    constraints = []
    for x in range(2):
        value = float(np.einsum("z,zc->", p_z, t1[x, :, 0, :]))
        constraints.append(MomentConstraint(f"A{x}", op("A", x, 0), value))
    for y in range(2):
        value = float(np.einsum("x,xa->", p_x, t0[:, y, :, 0]))
        constraints.append(MomentConstraint(f"B{y}", op("B", y, 0), value))
    for x, y in itertools.product(range(2), range(2)):
        constraints.append(
            MomentConstraint(f"AB{x}{y}", op("A", x, 0) * op("B", y, 0), float(t0[x, y, 0, 0]))
        )
    for z, c in itertools.product(range(2), range(k - 1)):
        value = float(np.einsum("x,xa->", p_x, t1[:, z, :, c]))
        constraints.append(MomentConstraint(f"C{c}|{z}", op("C", z, c), value))
    for x, z, c in itertools.product(range(2), range(2), range(k - 1)):
        constraints.append(
            MomentConstraint(
                f"AC{x}{c}|{z}", op("A", x, 0) * op("C", z, c), float(t1[x, z, 0, c])
            )
        )
    return constraints


def coarse_values(spec: GuessingProgramSpec, herald: HeraldedBehavior) -> dict[str, float]:
    """Heralded ω, err_z and τ_z for the coarse program.

    ``spec.coarse_stats`` takes precedence when present; err_z is then
    Q_z · τ_z.
    """
    stats = spec.coarse_stats
    if stats is not None:
        return {
            "omega": stats.omega,
            "error0": stats.q0 * stats.tau0,
            "error1": stats.q1 * stats.tau1,
            "tau0": stats.tau0,
            "tau1": stats.tau1,
        }

    p_x = np.asarray(herald.p_x)
    p_y = np.asarray(herald.p_y)
    t0 = herald.table0
    t1 = herald.table1
    omega = sum(
        p_x[x] * p_y[y] * t0[x, y, a, a ^ (x * y)]
        for x, y, a in itertools.product(range(2), range(2), range(2))
    )
    values = {"omega": float(omega)}
    for z in range(2):
        values[f"error{z}"] = float(t1[z, z, 0, 1] + t1[z, z, 1, 0])
        values[f"tau{z}"] = float(np.einsum("x,xac->", p_x, t1[:, z, :, :2]))
    return values


def _coarse_constraints(
    scenario: Scenario, values: dict[str, float], client_outcomes: int, p_x, p_y
) -> list[MomentConstraint]:
    def op(party: str, setting: int, outcome: int) -> Polynomial:
        return projector(scenario, party, (setting,), outcome)

    omega = Polynomial()
    for x, y, a in itertools.product(range(2), range(2), range(2)):
        omega = omega + float(p_x[x] * p_y[y]) * (op("A", x, a) * op("B", y, a ^ (x * y)))
    constraints = [MomentConstraint("omega", omega, values["omega"])]
    for z in range(2):
        error = op("A", z, 0) * op("C", z, 1) + op("A", z, 1) * op("C", z, 0)
        constraints.append(MomentConstraint(f"error{z}", error, values[f"error{z}"]))
        tau = Polynomial()
        for c in range(min(client_outcomes, 2)):
            tau = tau + op("C", z, c)
        constraints.append(MomentConstraint(f"tau{z}", tau, values[f"tau{z}"]))
    return constraints


def build_guessing_program(
    spec: GuessingProgramSpec,
    herald: HeraldedBehavior,
    constraints: bool = True,
) -> MomentRelaxation:
    """Moment relaxation of the guessing probability.

    Args:
        spec: Program inputs
        herald: Heralded behavior supplying constraint values
        constraints: Set False to drop every behavior equality

    Returns:
        MomentRelaxation in maximization form
    """
    k = herald.client_outcomes
    scenario = guessing_scenario(k)
    weights = generation_weights(herald.p_x, herald.p_z)
    objective = guessing_objective(scenario, weights, k)

    rows: list[MomentConstraint] = []
    if constraints:
        if spec.constraint_mode is ConstraintMode.FULL_DISTRIBUTION:
            rows = _full_constraints(scenario, herald)
        else:
            rows = _coarse_constraints(
                scenario, coarse_values(spec, herald), k, herald.p_x, herald.p_y
            )

    monomials = generate_monomials(scenario, spec.level, spec.extras)
    # Honest data sit on the boundary of the quantum set (ω at Tsirelson's
    # bound), where exact equalities leave no strictly feasible moment matrix.
    return build_moment_sdp(
        monomials,
        objective,
        rows,
        sense=Sense.MAXIMIZE,
        elastic=settings.npa_elastic_penalty,
    )


def guessing_probability(
    spec: GuessingProgramSpec,
    opts: SolverOptions | None = None,
    constrained: bool = True,
) -> GuessingResult:
    """Certified upper bound on Charlie's guessing probability.

    Args:
        spec: Program inputs
        opts: Solver options (defaults from settings)
        constrained: Set False to solve with no behavior equalities

    Returns:
        GuessingResult with the dual objective as ``pg_upper``

    Raises:
        NoSignallingError: If the behavior fails the no-signalling check
        UndefinedConditioningError: If a herald event has probability 0
        ValidationError: If Pr[Z≠X] is 0
        SolverError: If the solve is not acceptable
    """
    report = check_no_signalling(spec.behavior, tol=settings.no_signalling_tol)
    if not report.passed:
        raise NoSignallingError(
            f"Behavior signals by {report.max_deviation:.3e} (tolerance {report.tol:.1e})"
        )

    behavior = effective_behavior(spec)
    herald = heralded(behavior)
    generation_weights(behavior.p_x, behavior.p_z)

    relaxation = build_guessing_program(spec, herald, constraints=constrained)
    opts = opts or SolverOptions()
    solution = solve(relaxation.problem, opts)
    if not solution.is_acceptable():
        if not solution.certifies_dual_bound(opts.feas_tol):
            raise SolverError(
                f"Guessing program ended with status {solution.status.value}",
                status=solution.status.value,
            )
        logger.warning(
            f"Guessing program stopped with status {solution.status.value} "
            f"(gap {solution.gap:.2e}); using its dual bound"
        )

    constant, certificate = relaxation.certificate(solution)
    values = {}
    if constrained:
        if spec.constraint_mode is ConstraintMode.COARSE_GRAINED:
            values = coarse_values(spec, herald)
        else:
            values = {
                row.name: row.value
                for row in _full_constraints(guessing_scenario(herald.client_outcomes), herald)
            }

    pg_upper = min(float(solution.dual_objective), 1.0)
    logger.info(
        f"Guessing program ({spec.constraint_mode.value}, {spec.mode.value}): "
        f"pg_upper={pg_upper:.6f} status={solution.status.value}"
    )
    return GuessingResult(
        pg_upper=pg_upper,
        primal_value=float(solution.primal_objective),
        status=solution.status,
        gap=float(solution.gap),
        iterations=solution.iterations,
        certificate_constant=constant,
        dual_certificate=certificate,
        constraint_values=values,
        p_gen=generation_probability(behavior, herald.herald_rate),
        herald_rate=herald.herald_rate,
    )
