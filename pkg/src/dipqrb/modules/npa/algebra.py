"""Projector word algebra."""

from __future__ import annotations

from collections.abc import Iterable, Mapping

from dipqrb.exceptions import ValidationError
from dipqrb.modules.npa.schemas import IDENTITY, ZERO, Letter, Monomial, Scenario


def canonicalize(word: Iterable[Letter]) -> Monomial:
    """Reduce a word to its canonical representative.

    Adjacent letters of one measurement collapse by idempotence (equal
    outcomes) or orthogonality (the word becomes zero). Adjacent commuting
    letters are swapped into party order. Repeats until nothing changes.
    """
    letters = list(word)
    changed = True
    while changed:
        changed = False
        i = 0
        while i < len(letters) - 1:
            first, second = letters[i], letters[i + 1]
            if first.party == second.party and first.context == second.context:
                if first.outcome != second.outcome:
                    return ZERO
                del letters[i + 1]
                changed = True
                continue
            if first.commutes_with(second) and second.sort_key < first.sort_key:
                letters[i], letters[i + 1] = second, first
                changed = True
            i += 1
    return Monomial(tuple(letters))


def adjoint(monomial: Monomial) -> Monomial:
    """Reversed word (projectors are Hermitian)."""
    if monomial.is_zero:
        return ZERO
    return canonicalize(reversed(monomial.word))


def moment_key(word: Iterable[Letter] | Monomial) -> Monomial:
    """Representative of ⟨w⟩ in a real moment matrix: min of w and w†."""
    monomial = word if isinstance(word, Monomial) else canonicalize(word)
    if monomial.is_zero:
        return ZERO
    reverse = adjoint(monomial)
    return min(monomial, reverse, key=lambda m: m.key)


class Polynomial:
    """Real linear combination of canonical monomials."""

    def __init__(self, terms: Mapping[Monomial, float] | None = None):
        self._terms: dict[Monomial, float] = {}
        for monomial, coefficient in (terms or {}).items():
            self._accumulate(monomial, coefficient)

    def _accumulate(self, monomial: Monomial, coefficient: float) -> None:
        if monomial.is_zero or coefficient == 0.0:
            return
        total = self._terms.get(monomial, 0.0) + coefficient
        if total == 0.0:
            self._terms.pop(monomial, None)
        else:
            self._terms[monomial] = total

    @classmethod
    def constant(cls, value: float) -> Polynomial:
        return cls({IDENTITY: value})

    @classmethod
    def letter(cls, letter: Letter) -> Polynomial:
        return cls({Monomial((letter,)): 1.0})

    @property
    def terms(self) -> dict[Monomial, float]:
        return dict(self._terms)

    def __add__(self, other: Polynomial | float) -> Polynomial:
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(float(other))
        result = Polynomial(self._terms)
        for monomial, coefficient in other._terms.items():
            result._accumulate(monomial, coefficient)
        return result

    __radd__ = __add__

    def __neg__(self) -> Polynomial:
        return Polynomial({m: -c for m, c in self._terms.items()})

    def __sub__(self, other: Polynomial | float) -> Polynomial:
        return self + (-other)

    def __rsub__(self, other: float) -> Polynomial:
        return (-self) + other

    def __mul__(self, other: Polynomial | float) -> Polynomial:
        if not isinstance(other, Polynomial):
            return Polynomial({m: c * float(other) for m, c in self._terms.items()})
        result = Polynomial()
        for left, a in self._terms.items():
            for right, b in other._terms.items():
                result._accumulate(canonicalize(left.word + right.word), a * b)
        return result

    def __rmul__(self, other: float) -> Polynomial:
        return self * other

    def expectation_terms(self) -> dict[Monomial, float]:
        """Coefficients per moment key, merging w with w†."""
        merged: dict[Monomial, float] = {}
        for monomial, coefficient in self._terms.items():
            key = moment_key(monomial)
            merged[key] = merged.get(key, 0.0) + coefficient
        return {key: c for key, c in merged.items() if c != 0.0}

    def __repr__(self) -> str:
        if not self._terms:
            return "Polynomial(0)"
        body = " + ".join(f"{c:g}*[{m}]" for m, c in self._terms.items())
        return f"Polynomial({body})"


def projector(scenario: Scenario, party: str, context: tuple[int, ...], outcome: int) -> Polynomial:
    """Projector for any outcome; the last one expands to 1 - Σ others."""
    measurement = scenario.measurement(party, context)
    if not 0 <= outcome < measurement.num_outcomes:
        raise ValidationError(
            f"Outcome {outcome} outside {party}{context} with {measurement.num_outcomes} outcomes"
        )
    if outcome < measurement.num_outcomes - 1:
        return Polynomial.letter(Letter(party, tuple(context), outcome))

    result = Polynomial.constant(1.0)
    for letter in measurement.free_letters():
        result = result - Polynomial.letter(letter)
    return result
