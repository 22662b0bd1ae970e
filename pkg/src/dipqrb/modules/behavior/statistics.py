"""Empirical round statistics."""

from __future__ import annotations

import copy
import json
import threading

import numpy as np

from dipqrb.contracts import SCORES, Outcome, RoundRecord, Score
from dipqrb.exceptions import UndefinedConditioningError
from dipqrb.modules.behavior.schemas import Behavior
from dipqrb.utils.serialization import json_serializer

# Axes: s, x, y, z, a, b, c
_SHAPE = (2, 2, 2, 2, 3, 3, 3)


class RoundStatistics:
    """Counters over (s, x, y, z, a, b, c) cells and score symbols.

    One writer appends rounds; readers take snapshots.
    """

    def __init__(self):
        self._counts = np.zeros(_SHAPE, dtype=np.int64)
        self._scores = np.zeros(len(SCORES), dtype=np.int64)
        self._lock = threading.Lock()

    @property
    def total(self) -> int:
        return int(self._counts.sum())

    def add(self, record: RoundRecord) -> RoundStatistics:
        """Count one round."""
        with self._lock:
            self._counts[
                record.s, record.x, record.y, record.z,
                int(record.a), int(record.b), int(record.c),
            ] += 1
            self._scores[SCORES.index(record.d)] += 1
        return self

    def add_arrays(
        self,
        s: np.ndarray,
        x: np.ndarray,
        y: np.ndarray,
        z: np.ndarray,
        a: np.ndarray,
        b: np.ndarray,
        c: np.ndarray,
        scores: list[Score] | None = None,
    ) -> RoundStatistics:
        """Count many rounds given as parallel integer arrays."""
        with self._lock:
            np.add.at(self._counts, (s, x, y, z, a, b, c), 1)
            if scores is not None:
                for score in scores:
                    self._scores[SCORES.index(score)] += 1
        return self

    def snapshot(self) -> RoundStatistics:
        with self._lock:
            return copy.deepcopy(self)

    def __deepcopy__(self, memo):
        clone = RoundStatistics()
        clone._counts = self._counts.copy()
        clone._scores = self._scores.copy()
        return clone

    def counts(self) -> np.ndarray:
        """Copy of the raw counter array indexed [s, x, y, z, a, b, c]."""
        return self._counts.copy()

    def score_counts(self) -> dict[Score, int]:
        return {score: int(n) for score, n in zip(SCORES, self._scores)}

    def score_frequencies(self) -> dict[Score, float]:
        """Score frequencies (all zero before the first round)."""
        total = int(self._scores.sum())
        if total == 0:
            return {score: 0.0 for score in SCORES}
        return {score: float(n) / total for score, n in zip(SCORES, self._scores)}

    def to_behavior(
        self,
        num_outcomes: int = 3,
        p_x: tuple[float, float] = (0.5, 0.5),
        p_y: tuple[float, float] = (0.5, 0.5),
        p_z: tuple[float, float] = (0.5, 0.5),
        p_switch: float = 0.5,
    ) -> Behavior:
        """Empirical behavior from the counted rounds.

        Raises:
            UndefinedConditioningError: If some input pair was never seen
        """
        void = int(Outcome.VOID)
        counts0 = self._counts[0, :, :, :, :, :, void].sum(axis=2)  # [x, y, a, b]
        counts1 = self._counts[1, :, :, :, :, void, :].sum(axis=1)  # [x, z, a, c]

        tables = []
        for route, counts in ((0, counts0), (1, counts1)):
            totals = counts.sum(axis=(2, 3))
            if (totals == 0).any():
                raise UndefinedConditioningError(
                    f"No rounds observed for some inputs with s={route}"
                )
            if num_outcomes == 2 and counts[:, :, void, :].sum() + counts[:, :, :, void].sum() > 0:
                raise UndefinedConditioningError(
                    "Binary behavior requested but ∅ outcomes were counted"
                )
            tables.append(counts[:, :, :num_outcomes, :num_outcomes] / totals[:, :, None, None])

        return Behavior(tables[0], tables[1], p_x=p_x, p_y=p_y, p_z=p_z, p_switch=p_switch)

    def to_jsonl(self) -> str:
        """Non-empty cells and score counts as JSON lines."""
        total = self.total
        lines = []
        for index in zip(*np.nonzero(self._counts)):
            s, x, y, z, a, b, c = (int(v) for v in index)
            count = self._counts[index]
            lines.append(
                json.dumps(
                    {
                        "s": s,
                        "x": x,
                        "y": y,
                        "z": z,
                        "a": Outcome(a).label,
                        "b": Outcome(b).label,
                        "c": Outcome(c).label,
                        "count": count,
                        "frequency": count / total,
                    },
                    default=json_serializer,
                )
            )
        for score, frequency in self.score_frequencies().items():
            lines.append(
                json.dumps(
                    {
                        "score": score.value,
                        "count": self.score_counts()[score],
                        "frequency": frequency,
                    }
                )
            )
        return "\n".join(lines) + "\n"


def accumulate(state: RoundStatistics, record: RoundRecord) -> RoundStatistics:
    """Add one record to the accumulation state and return it."""
    return state.add(record)
