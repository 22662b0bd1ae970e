"""Extractor schemas."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from dipqrb.exceptions import ValidationError


def as_bits(values) -> np.ndarray:
    """0/1 values as a uint8 array.

    Raises:
        ValidationError: On any other value
    """
    bits = np.asarray(values, dtype=np.int64).ravel()
    if bits.size and (bits.min() < 0 or bits.max() > 1):
        raise ValidationError("Bit sequences may only contain 0 and 1")
    return bits.astype(np.uint8)


@dataclass(frozen=True, eq=False)
class ToeplitzSeed:
    """Diagonals of an n_out × n_in Toeplitz matrix.

    ``T[i][j] = bits[j - i + n_out - 1]``: the first row is
    ``bits[n_out-1:]`` and the first column, read from the bottom row up,
    is ``bits[:n_out]``.
    """

    bits: np.ndarray

    def __post_init__(self):
        bits = as_bits(self.bits)
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    def __len__(self) -> int:
        return len(self.bits)

    @staticmethod
    def required_length(n_in: int, n_out: int) -> int:
        return max(n_in + n_out - 1, 0)

    def check(self, n_in: int, n_out: int) -> None:
        """Raises ValidationError unless the seed fits an n_out × n_in matrix."""
        required = self.required_length(n_in, n_out)
        if len(self) != required:
            raise ValidationError(
                f"Seed has {len(self)} bits, a {n_out}×{n_in} matrix needs {required}"
            )

    @classmethod
    def random(cls, length: int, rng: np.random.Generator) -> ToeplitzSeed:
        return cls(rng.integers(0, 2, size=length, dtype=np.uint8))

    @classmethod
    def from_hex(cls, text: str, length: int | None = None) -> ToeplitzSeed:
        """Seed from hex, most significant bit first, truncated to ``length``.

        Raises:
            ValidationError: On bad hex or too few bits
        """
        try:
            data = bytes.fromhex("".join(text.split()))
        except ValueError as e:
            raise ValidationError(f"Seed is not valid hex: {e}") from e
        bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8))
        if length is not None:
            if length > len(bits):
                raise ValidationError(f"Seed provides {len(bits)} bits, {length} needed")
            bits = bits[:length]
        return cls(bits)

    def to_hex(self) -> str:
        return np.packbits(self.bits).tobytes().hex()

    def matrix(self, n_in: int, n_out: int) -> np.ndarray:
        """Materialized matrix (for small sizes and tests)."""
        self.check(n_in, n_out)
        i = np.arange(n_out)[:, None]
        j = np.arange(n_in)[None, :]
        return self.bits[j - i + n_out - 1]
