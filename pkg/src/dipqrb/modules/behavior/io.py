"""CSV import/export of behavior tables."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from dipqrb.contracts import Outcome
from dipqrb.exceptions import ValidationError
from dipqrb.modules.behavior.schemas import Behavior

CSV_COLUMNS = ["s", "x", "y", "z", "a", "b", "c", "probability"]


def behavior_rows(behavior: Behavior) -> list[dict[str, str]]:
    """Every cell of both tables, zeros included, in canonical order."""
    k = behavior.num_outcomes
    void = Outcome.VOID.label
    rows = []
    for x in range(2):
        for y in range(2):
            for a in range(k):
                for b in range(k):
                    rows.append(
                        {
                            "s": "0",
                            "x": str(x),
                            "y": str(y),
                            "z": "",
                            "a": Outcome(a).label,
                            "b": Outcome(b).label,
                            "c": void,
                            "probability": repr(float(behavior.table0[x, y, a, b])),
                        }
                    )
    for x in range(2):
        for z in range(2):
            for a in range(k):
                for c in range(k):
                    rows.append(
                        {
                            "s": "1",
                            "x": str(x),
                            "y": "",
                            "z": str(z),
                            "a": Outcome(a).label,
                            "b": void,
                            "c": Outcome(c).label,
                            "probability": repr(float(behavior.table1[x, z, a, c])),
                        }
                    )
    return rows


def write_behavior_csv(behavior: Behavior, path: str | Path) -> None:
    """Write both tables with columns s,x,y,z,a,b,c,probability."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        writer.writerows(behavior_rows(behavior))


def read_behavior_csv(
    path: str | Path,
    p_x: tuple[float, float] = (0.5, 0.5),
    p_y: tuple[float, float] = (0.5, 0.5),
    p_z: tuple[float, float] = (0.5, 0.5),
    p_switch: float = 0.5,
) -> Behavior:
    """Read tables written by :func:`write_behavior_csv`.

    The outcome alphabet is ternary if any measured outcome is ∅.

    Raises:
        ValidationError: On malformed rows
    """
    with open(path, newline="", encoding="utf-8") as handle:
        rows = list(csv.DictReader(handle))

    if not rows or set(CSV_COLUMNS) - set(rows[0]):
        raise ValidationError(f"Behavior CSV must have columns {CSV_COLUMNS}")

    table0 = np.zeros((2, 2, 3, 3))
    table1 = np.zeros((2, 2, 3, 3))
    ternary = False
    try:
        for row in rows:
            s, x = int(row["s"]), int(row["x"])
            a = Outcome.parse(row["a"])
            probability = float(row["probability"])
            if s == 0:
                second = Outcome.parse(row["b"])
                table0[x, int(row["y"]), a, second] = probability
            else:
                second = Outcome.parse(row["c"])
                table1[x, int(row["z"]), a, second] = probability
            ternary = ternary or Outcome.VOID in (a, second)
    except (KeyError, ValueError, IndexError) as e:
        raise ValidationError(f"Malformed behavior CSV row: {e}") from e

    k = 3 if ternary else 2
    return Behavior(
        table0[:, :, :k, :k],
        table1[:, :, :k, :k],
        p_x=p_x,
        p_y=p_y,
        p_z=p_z,
        p_switch=p_switch,
    )
