"""Toeplitz-hashing randomness extraction."""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from pathlib import Path

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from dipqrb.contracts import Mode, Outcome
from dipqrb.exceptions import ValidationError
from dipqrb.modules.extractor.schemas import ToeplitzSeed, as_bits
from dipqrb.settings import settings
from dipqrb.utils.observability import measure_latency

logger = logging.getLogger(__name__)

_PARITY = np.array([bin(v).count("1") & 1 for v in range(256)], dtype=np.uint8)

_TRIT_CODES = {
    Outcome.ZERO: (0, 0),
    Outcome.ONE: (0, 1),
    Outcome.VOID: (1, 0),
}


def output_length(certified_bits: float, security_exponent: int | None = None) -> int:
    """Leftover-hash output length floor(bits - 2·security_exponent), at least 0.

    Raises:
        ValidationError: If certified_bits is negative
    """
    if certified_bits < 0:
        raise ValidationError(f"certified_bits must be non-negative, got {certified_bits}")
    exponent = settings.security_exponent if security_exponent is None else security_exponent
    return max(0, math.floor(certified_bits - 2 * exponent))


def encode_trits(outcomes: Sequence[Outcome | int]) -> np.ndarray:
    """Two bits per outcome: 0→00, 1→01, ∅→10."""
    bits = np.zeros(2 * len(outcomes), dtype=np.uint8)
    for k, outcome in enumerate(outcomes):
        bits[2 * k], bits[2 * k + 1] = _TRIT_CODES[Outcome(outcome)]
    return bits


def raw_to_bits(raw: Sequence[Outcome], mode: Mode) -> np.ndarray:
    """Extractor input for a raw client string.

    Raises:
        ValidationError: If a fully-DI string still contains ∅
    """
    if mode is Mode.SEMI_DI:
        return encode_trits(raw)
    if any(Outcome(c) is Outcome.VOID for c in raw):
        raise ValidationError("Fully-DI raw strings cannot contain ∅")
    return np.array([int(c) for c in raw], dtype=np.uint8)


def _check(bits: np.ndarray, seed: ToeplitzSeed, n_out: int) -> None:
    if n_out < 0:
        raise ValidationError(f"n_out must be non-negative, got {n_out}")
    if n_out > len(bits):
        raise ValidationError(f"Cannot extract {n_out} bits from {len(bits)} input bits")
    seed.check(len(bits), n_out)


def extract_naive(input_bits, seed: ToeplitzSeed, n_out: int) -> np.ndarray:
    """T·x over GF(2) with the matrix materialized."""
    x = as_bits(input_bits)
    _check(x, seed, n_out)
    if n_out == 0:
        return np.zeros(0, dtype=np.uint8)
    product = seed.matrix(len(x), n_out).astype(np.int64) @ x.astype(np.int64)
    return (product % 2).astype(np.uint8)


def extract(input_bits, seed: ToeplitzSeed, n_out: int, block_rows: int = 256) -> np.ndarray:
    """T·x over GF(2), packing rows into bytes block by block.

    Row i of T is the seed window starting at n_out-1-i.

    Args:
        input_bits: Input bits, index 0 the earliest round
        seed: Toeplitz seed of length n_in + n_out - 1
        n_out: Output length
        block_rows: Rows packed per step

    Returns:
        Output bits, index 0 is row 0

    Raises:
        ValidationError: On length mismatches
    """
    x = as_bits(input_bits)
    _check(x, seed, n_out)
    if n_out == 0:
        return np.zeros(0, dtype=np.uint8)

    with measure_latency("extract"):
        windows = sliding_window_view(seed.bits, len(x))
        packed_x = np.packbits(x)
        out = np.empty(n_out, dtype=np.uint8)
        for start in range(0, n_out, block_rows):
            stop = min(start + block_rows, n_out)
            rows = windows[n_out - 1 - np.arange(start, stop)]
            folded = np.bitwise_xor.reduce(np.packbits(rows, axis=1) & packed_x, axis=1)
            out[start:stop] = _PARITY[folded]

    logger.debug(f"Extracted {n_out} bits from {len(x)} input bits")
    return out


def read_bits(path: str | Path) -> np.ndarray:
    """Read bits from a ``.hex`` text file or a raw binary file (MSB first)."""
    path = Path(path)
    if path.suffix.lower() == ".hex":
        text = "".join(path.read_text(encoding="utf-8").split())
        try:
            data = bytes.fromhex(text)
        except ValueError as e:
            raise ValidationError(f"{path} is not valid hex: {e}") from e
    else:
        data = path.read_bytes()
    return np.unpackbits(np.frombuffer(data, dtype=np.uint8))


def bits_to_hex(bits) -> str:
    """Hex of the bits, MSB first, zero-padded to whole bytes."""
    return np.packbits(as_bits(bits)).tobytes().hex()


def write_hex(path: str | Path, bits) -> None:
    text = bits_to_hex(bits)
    Path(path).write_text(text + "\n" if text else "", encoding="utf-8")
