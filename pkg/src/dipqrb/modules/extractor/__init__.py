"""Seeded Toeplitz-hashing extractor."""

from dipqrb.modules.extractor.schemas import ToeplitzSeed, as_bits
from dipqrb.modules.extractor.service import (
    bits_to_hex,
    encode_trits,
    extract,
    extract_naive,
    output_length,
    raw_to_bits,
    read_bits,
    write_hex,
)

__all__ = [
    "ToeplitzSeed",
    "as_bits",
    "bits_to_hex",
    "encode_trits",
    "extract",
    "extract_naive",
    "output_length",
    "raw_to_bits",
    "read_bits",
    "write_hex",
]
