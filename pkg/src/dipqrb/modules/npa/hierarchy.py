"""Monomial generation and moment-matrix SDP assembly."""

from __future__ import annotations

import itertools
import logging
import re
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from dipqrb.exceptions import MomentNotFoundError, ValidationError
from dipqrb.modules.npa.algebra import Polynomial, canonicalize, moment_key
from dipqrb.modules.npa.schemas import IDENTITY, Monomial, Scenario
from dipqrb.modules.sdp import SdpProblem, SdpSolution, Sense

logger = logging.getLogger(__name__)

_LEVEL_PATTERN = re.compile(r"^\s*(\d+)\s*((?:\+\s*[A-Z]+\s*)*)$")


def parse_level(text: str) -> tuple[int, list[str]]:
    """Parse ``"1+AB+AC"`` into ``(1, ["AB", "AC"])``.

    Raises:
        ValidationError: On malformed input
    """
    match = _LEVEL_PATTERN.match(text)
    if not match:
        raise ValidationError(f"Invalid hierarchy level {text!r}")
    extras = [part.strip() for part in match.group(2).split("+") if part.strip()]
    return int(match.group(1)), extras


def generate_monomials(
    scenario: Scenario,
    level: int,
    extras: Sequence[str] = (),
) -> list[Monomial]:
    """Canonical non-zero words of length ≤ level plus extra party products.

    Args:
        scenario: Available measurements
        level: Maximum word length (≥ 1)
        extras: Party patterns such as ``"AC"``; each adds every product of
            one free letter per listed party

    Returns:
        Deduplicated monomials, identity first

    Raises:
        ValidationError: On a bad level or unknown party in a pattern
    """
    if level < 1:
        raise ValidationError(f"Hierarchy level must be at least 1, got {level}")

    letters = scenario.letters()
    seen: dict[Monomial, None] = {IDENTITY: None}
    frontier = [IDENTITY]
    for _ in range(level):
        next_frontier = []
        for monomial in frontier:
            for letter in letters:
                candidate = canonicalize(monomial.word + (letter,))
                if candidate.is_zero or candidate in seen:
                    continue
                seen[candidate] = None
                next_frontier.append(candidate)
        frontier = next_frontier

    parties = set(scenario.parties)
    for pattern in extras:
        unknown = set(pattern) - parties
        if unknown:
            raise ValidationError(f"Pattern {pattern!r} names unknown parties {sorted(unknown)}")
        for combo in itertools.product(*(scenario.letters(p) for p in pattern)):
            candidate = canonicalize(combo)
            if not candidate.is_zero and candidate not in seen:
                seen[candidate] = None

    return list(seen)


class MomentIndex:
    """Moment variables of the matrix Γ[p, q] = ⟨m_p† m_q⟩.

    Index 0 is the identity moment. Each moment keeps the list of
    upper-triangular entries where it appears; entries whose product
    collapses to zero are kept separately.
    """

    def __init__(self, monomials: Sequence[Monomial]):
        if not monomials or not monomials[0].is_identity:
            raise ValidationError("The first monomial must be the identity")

        self.monomials = list(monomials)
        self._index: dict[Monomial, int] = {}
        self.entries: list[list[tuple[int, int]]] = []
        self.zero_entries: list[tuple[int, int]] = []

        for p, left in enumerate(self.monomials):
            left_adjoint = tuple(reversed(left.word))
            for q in range(p, len(self.monomials)):
                key = moment_key(left_adjoint + self.monomials[q].word)
                if key.is_zero:
                    self.zero_entries.append((p, q))
                    continue
                index = self._index.get(key)
                if index is None:
                    index = len(self.entries)
                    self._index[key] = index
                    self.entries.append([])
                self.entries[index].append((p, q))

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, monomial: Monomial) -> bool:
        return moment_key(monomial) in self._index

    @property
    def dimension(self) -> int:
        return len(self.monomials)

    def index_of(self, monomial: Monomial) -> int:
        """Moment variable of ``monomial`` (or its adjoint).

        Raises:
            MomentNotFoundError: If the moment is not in the matrix
        """
        key = moment_key(monomial)
        try:
            return self._index[key]
        except KeyError:
            raise MomentNotFoundError(
                f"Moment ⟨{key}⟩ is not in the moment matrix; raise the hierarchy level",
                moment=key,
            ) from None

    def representative(self, index: int) -> tuple[int, int]:
        return self.entries[index][0]

    def moment_values(self, gamma: np.ndarray) -> dict[Monomial, float]:
        """Read moments from a (solved) moment matrix."""
        return {key: float(gamma[self.entries[i][0]]) for key, i in self._index.items()}


@dataclass(frozen=True)
class MomentConstraint:
    """Equality ⟨functional⟩ = value."""

    name: str
    functional: Polynomial
    value: float


@dataclass(frozen=True, eq=False)
class MomentRelaxation:
    """Moment SDP plus the bookkeeping needed to read certificates."""

    problem: SdpProblem
    index: MomentIndex
    constraint_rows: dict[str, int | None] = field(default_factory=dict)

    def certificate(self, solution: SdpSolution) -> tuple[float, dict[str, float]]:
        """Affine bound ``constant + Σ coef[name] · value[name]`` on the optimum.

        Valid for any constraint values while the dual slack stays PSD
        (maximization). Constraints merged into an earlier row get 0.
        """
        y = np.asarray(solution.y)
        used: set[int] = set()
        coefficients: dict[str, float] = {}
        for name, row in self.constraint_rows.items():
            if row is None or row in used or row == 0:
                coefficients[name] = 0.0
                continue
            used.add(row)
            coefficients[name] = float(y[row])
        return float(y[0]), coefficients


def _functional_atoms(poly: Polynomial, index: MomentIndex) -> tuple[tuple[int, int, float], ...]:
    merged: dict[tuple[int, int], float] = {}
    for key, coefficient in poly.expectation_terms().items():
        entry = index.representative(index.index_of(key))
        merged[entry] = merged.get(entry, 0.0) + coefficient
    return tuple(sorted((p, q, c) for (p, q), c in merged.items() if c != 0.0))


def build_moment_sdp(
    monomials: Sequence[Monomial],
    objective: Polynomial,
    constraints: Sequence[MomentConstraint | tuple[Polynomial, float]] = (),
    sense: Sense = Sense.MAXIMIZE,
    elastic: float | None = None,
) -> MomentRelaxation:
    """Assemble the moment relaxation as a standard-form SDP.

    Rows, in order: Γ[1, 1] = 1; one row tying each repeated moment entry
    to its representative; one row per entry that orthogonality forces to
    zero; one row per distinct user constraint.

    With ``elastic`` set, every user row gets a pair of non-negative slacks
    in a second diagonal block, each priced at ``elastic`` in the
    objective. The dual is then the exact dual with |y_i| ≤ elastic on
    those rows, so its objective still bounds the exact optimum, while the
    primal keeps an interior point when the data lie on the boundary of
    the quantum set.

    Args:
        monomials: Monomial list (identity first)
        objective: Functional to optimize
        constraints: Behavior equalities, named or as (functional, value)
        sense: Optimization direction
        elastic: Slack penalty; None keeps exact equalities

    Returns:
        MomentRelaxation with the problem and row bookkeeping

    Raises:
        MomentNotFoundError: If a functional needs a moment outside the matrix
        ValidationError: If two constraints fix one functional to different values
    """
    index = MomentIndex(monomials)

    rows: list[tuple[tuple[int, int, float], ...]] = [((0, 0, 1.0),)]
    rhs: list[float] = [1.0]
    for entries in index.entries:
        p0, q0 = entries[0]
        for p, q in entries[1:]:
            rows.append(((p0, q0, 1.0), (p, q, -1.0)))
            rhs.append(0.0)
    for p, q in index.zero_entries:
        rows.append(((p, q, 1.0),))
        rhs.append(0.0)

    row_of: dict[tuple, int] = {rows[0]: 0}
    constraint_rows: dict[str, int | None] = {}
    for position, item in enumerate(constraints):
        if isinstance(item, MomentConstraint):
            name, functional, value = item.name, item.functional, float(item.value)
        else:
            functional, value = item
            name, value = f"c{position}", float(value)

        atoms = _functional_atoms(functional, index)
        if not atoms:
            if abs(value) > 1e-6:
                raise ValidationError(f"Constraint {name} fixes the zero functional to {value}")
            constraint_rows[name] = None
            continue

        existing = row_of.get(atoms)
        if existing is not None:
            if abs(rhs[existing] - value) > 1e-6:
                raise ValidationError(
                    f"Constraint {name} conflicts with an earlier row: "
                    f"{value} vs {rhs[existing]}"
                )
            constraint_rows[name] = existing
            continue

        row_of[atoms] = len(rows)
        constraint_rows[name] = len(rows)
        rows.append(atoms)
        rhs.append(value)

    block_dims: tuple[int, ...] = (index.dimension,)
    objective_atoms = _functional_atoms(objective, index)
    user_rows = sorted(set(row_of.values()) - {0})
    if elastic is not None and user_rows:
        if elastic <= 0.0:
            raise ValidationError(f"Elastic penalty must be positive, got {elastic}")
        price = -elastic if sense is Sense.MAXIMIZE else elastic
        slack_atoms = []
        for k, row in enumerate(user_rows):
            up = index.dimension + 2 * k
            down = up + 1
            rows[row] = rows[row] + ((up, up, 1.0), (down, down, -1.0))
            slack_atoms += [(up, up, price), (down, down, price)]
        block_dims = (index.dimension, 2 * len(user_rows))
        objective_atoms = objective_atoms + tuple(slack_atoms)

    problem = SdpProblem(
        block_dims=block_dims,
        objective=objective_atoms,
        constraints=tuple(rows),
        rhs=np.array(rhs),
        sense=sense,
    )
    logger.debug(
        f"Moment SDP: {index.dimension} monomials, {len(index)} moments, "
        f"{problem.num_constraints} constraints"
    )
    return MomentRelaxation(problem=problem, index=index, constraint_rows=constraint_rows)
