"""NPA schemas: projector letters, words and scenarios."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from dipqrb.exceptions import ValidationError

# Commuting letters are sorted by this order; B never moves past C or E.
PARTY_ORDER = {"A": 0, "C": 1, "E": 2, "B": 3}
COMMUTING_PAIRS = frozenset(
    {frozenset("AB"), frozenset("AC"), frozenset("AE"), frozenset("CE")}
)


@dataclass(frozen=True)
class Letter:
    """Projector onto ``outcome`` of ``party``'s measurement ``context``.

    A, B and C contexts are a single input; E contexts are (a, x, z).
    """

    party: str
    context: tuple[int, ...]
    outcome: int

    def __post_init__(self):
        if self.party not in PARTY_ORDER:
            raise ValidationError(f"Unknown party {self.party!r}")
        expected = 3 if self.party == "E" else 1
        if len(self.context) != expected:
            raise ValidationError(
                f"{self.party} letters need a context of length {expected}, got {self.context}"
            )

    @property
    def sort_key(self) -> tuple:
        return (PARTY_ORDER[self.party], self.context, self.outcome)

    def commutes_with(self, other: Letter) -> bool:
        return frozenset((self.party, other.party)) in COMMUTING_PAIRS

    def __str__(self) -> str:
        context = ",".join(str(v) for v in self.context)
        return f"{self.party}{self.outcome}|{context}"


@dataclass(frozen=True)
class Monomial:
    """Canonical operator word; ``is_zero`` marks an orthogonality collapse."""

    word: tuple[Letter, ...] = ()
    is_zero: bool = False

    @property
    def key(self) -> tuple:
        return (len(self.word), tuple(letter.sort_key for letter in self.word))

    @property
    def is_identity(self) -> bool:
        return not self.is_zero and not self.word

    def __len__(self) -> int:
        return len(self.word)

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        return " ".join(str(letter) for letter in self.word) or "1"


IDENTITY = Monomial()
ZERO = Monomial(is_zero=True)


@dataclass(frozen=True)
class Measurement:
    party: str
    context: tuple[int, ...]
    num_outcomes: int

    def __post_init__(self):
        if self.num_outcomes < 2:
            raise ValidationError("A measurement needs at least two outcomes")

    def free_letters(self) -> list[Letter]:
        """Letters for every outcome but the last (eliminated by completeness)."""
        return [Letter(self.party, self.context, k) for k in range(self.num_outcomes - 1)]


@dataclass(frozen=True)
class Scenario:
    """Measurements available to each party."""

    measurements: tuple[Measurement, ...]
    _lookup: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        lookup = {}
        for measurement in self.measurements:
            key = (measurement.party, measurement.context)
            if key in lookup:
                raise ValidationError(f"Duplicate measurement {key}")
            lookup[key] = measurement
        object.__setattr__(self, "_lookup", lookup)

    @property
    def parties(self) -> list[str]:
        return sorted({m.party for m in self.measurements}, key=PARTY_ORDER.get)

    def measurement(self, party: str, context: tuple[int, ...]) -> Measurement:
        try:
            return self._lookup[(party, tuple(context))]
        except KeyError:
            raise ValidationError(f"No measurement {party} with context {context}") from None

    def letters(self, party: str | None = None) -> list[Letter]:
        return [
            letter
            for measurement in self.measurements
            if party is None or measurement.party == party
            for letter in measurement.free_letters()
        ]

    @classmethod
    def chsh(cls) -> Scenario:
        """Two parties, binary inputs and outputs."""
        return cls(
            tuple(
                Measurement(party, (setting,), 2)
                for party in ("A", "B")
                for setting in (0, 1)
            )
        )

    @classmethod
    def routed(
        cls,
        a_outcomes: int = 2,
        b_outcomes: int = 2,
        c_outcomes: int = 3,
        e_contexts: list[tuple[int, int, int]] | None = None,
    ) -> Scenario:
        """Routed Bell test with an adversary guessing Charlie's outcome.

        Args:
            a_outcomes: Alice's outcome count
            b_outcomes: Bob's outcome count
            c_outcomes: Charlie's outcome count (3 keeps ∅)
            e_contexts: (a, x, z) contexts for the adversary's guess;
                all of them by default

        Returns:
            Scenario over parties A, B, C, E
        """
        if e_contexts is None:
            e_contexts = list(itertools.product(range(a_outcomes), range(2), range(2)))
        measurements = [
            Measurement(party, (setting,), outcomes)
            for party, outcomes in (("A", a_outcomes), ("B", b_outcomes), ("C", c_outcomes))
            for setting in (0, 1)
        ]
        measurements += [Measurement("E", tuple(ctx), c_outcomes) for ctx in e_contexts]
        return cls(tuple(measurements))
