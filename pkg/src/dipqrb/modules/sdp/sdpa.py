"""Sparse SDPA text format.

SDPA's dual form ``max tr(F0 Y) s.t. tr(F_i Y) = c_i, Y ⪰ 0`` is our
primal with F0 = C, F_i = A_i and c = b. Minimization problems are written
with F0 = -C and a ``* sense: min`` comment so they read back unchanged.
"""

from __future__ import annotations

import re
from collections import defaultdict
from pathlib import Path

import numpy as np

from dipqrb.exceptions import ValidationError
from dipqrb.modules.sdp.schemas import Atom, SdpProblem, Sense

_NUMBER_SPLIT = re.compile(r"[,\s{}()]+")


def _entries(atoms: tuple[Atom, ...], offsets: np.ndarray, sign: float):
    """Merge atoms into upper-triangular (block, i, j, value) entries (1-based)."""
    values: dict[tuple[int, int], float] = defaultdict(float)
    for p, q, c in atoms:
        values[(p, q)] += sign * (c if p == q else c / 2.0)
    for (p, q), value in sorted(values.items()):
        if value == 0.0:
            continue
        block = int(np.searchsorted(offsets, p, side="right"))
        start = offsets[block - 1]
        yield block, p - start + 1, q - start + 1, value


def write_sdpa(problem: SdpProblem, path: str | Path) -> None:
    """Write ``problem`` in sparse SDPA format."""
    offsets = np.cumsum((0,) + problem.block_dims)[:-1]
    sign = 1.0 if problem.sense is Sense.MAXIMIZE else -1.0

    lines = [
        '"dipqrb moment relaxation"',
        f"* sense: {problem.sense.value}",
        str(problem.num_constraints),
        str(len(problem.block_dims)),
        " ".join(str(d) for d in problem.block_dims),
        " ".join(repr(float(v)) for v in problem.rhs),
    ]
    for block, i, j, value in _entries(problem.objective, offsets, sign):
        lines.append(f"0 {block} {i} {j} {value!r}")
    for k, atoms in enumerate(problem.constraints, start=1):
        for block, i, j, value in _entries(atoms, offsets, 1.0):
            lines.append(f"{k} {block} {i} {j} {value!r}")

    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_sdpa(path: str | Path) -> SdpProblem:
    """Read a sparse SDPA file.

    Negative block sizes (LP blocks) are not supported.

    Raises:
        ValidationError: On malformed or unsupported input
    """
    sense = Sense.MAXIMIZE
    body: list[str] = []
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line:
            continue
        if line[0] in "\"*":
            match = re.match(r"\*\s*sense:\s*(max|min)", line)
            if match:
                sense = Sense(match.group(1))
            continue
        body.append(line)

    try:
        m = int(_first_numbers(body[0], 1)[0])
        nblocks = int(_first_numbers(body[1], 1)[0])
        dims = tuple(int(v) for v in _first_numbers(body[2], nblocks))
        rhs = [float(v) for v in _first_numbers(body[3], m)]
    except (IndexError, ValueError) as e:
        raise ValidationError(f"Malformed SDPA header: {e}") from e

    if min(dims) <= 0:
        raise ValidationError("LP (negative) blocks are not supported")

    offsets = np.cumsum((0,) + dims)[:-1]
    sign = 1.0 if sense is Sense.MAXIMIZE else -1.0
    matrices: list[list[Atom]] = [[] for _ in range(m + 1)]
    for line in body[4:]:
        try:
            k, block, i, j, value = _first_numbers(line, 5)
            k, block, i, j = int(k), int(block), int(i), int(j)
            value = float(value)
        except ValueError as e:
            raise ValidationError(f"Malformed SDPA entry: {line!r}") from e
        if not (0 <= k <= m and 1 <= block <= nblocks):
            raise ValidationError(f"SDPA entry out of range: {line!r}")
        size = dims[block - 1]
        if not (1 <= i <= size and 1 <= j <= size):
            raise ValidationError(f"SDPA entry outside block {block} of size {size}: {line!r}")
        p = offsets[block - 1] + i - 1
        q = offsets[block - 1] + j - 1
        coefficient = value if p == q else 2.0 * value
        if k == 0:
            coefficient *= sign
        matrices[k].append((int(p), int(q), coefficient))

    return SdpProblem(
        block_dims=dims,
        objective=tuple(matrices[0]),
        constraints=tuple(tuple(atoms) for atoms in matrices[1:]),
        rhs=np.array(rhs),
        sense=sense,
    )


def _first_numbers(line: str, count: int) -> list[str]:
    tokens = [t for t in _NUMBER_SPLIT.split(line) if t]
    if len(tokens) < count:
        raise ValueError(f"expected {count} numbers in {line!r}")
    return tokens[:count]
