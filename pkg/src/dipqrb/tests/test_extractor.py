"""Tests for the Toeplitz extractor."""

import numpy as np
import pytest

from dipqrb.contracts import Mode, Outcome
from dipqrb.exceptions import ValidationError
from dipqrb.modules.extractor import (
    ToeplitzSeed,
    bits_to_hex,
    encode_trits,
    extract,
    extract_naive,
    output_length,
    raw_to_bits,
    read_bits,
    write_hex,
)


def random_case(rng, n_in, n_out):
    seed = ToeplitzSeed.random(ToeplitzSeed.required_length(n_in, n_out), rng)
    return rng.integers(0, 2, size=n_in), seed


class TestOutputLength:
    """Test cases for the leftover-hash output length."""

    @pytest.mark.parametrize(
        "bits, exponent, expected",
        [(100.0, 10, 80), (5.0, 10, 0), (0.0, 3, 0), (100.9, 10, 80)],
    )
    def test_examples(self, bits, exponent, expected):
        assert output_length(bits, exponent) == expected

    def test_rejects_negative(self):
        with pytest.raises(ValidationError):
            output_length(-1.0, 10)


class TestToeplitzSeed:
    """Test cases for seeds and the materialized matrix."""

    def test_rejects_non_bits(self):
        with pytest.raises(ValidationError):
            ToeplitzSeed(np.array([0, 2, 1]))

    def test_hex_round_trip(self):
        seed = ToeplitzSeed.from_hex("a5f0")
        assert seed.bits.tolist() == [1, 0, 1, 0, 0, 1, 0, 1, 1, 1, 1, 1, 0, 0, 0, 0]
        assert seed.to_hex() == "a5f0"

    def test_hex_truncation(self):
        assert ToeplitzSeed.from_hex("ff", length=5).bits.tolist() == [1] * 5

    def test_hex_too_short(self):
        with pytest.raises(ValidationError):
            ToeplitzSeed.from_hex("ff", length=9)

    def test_bad_hex(self):
        with pytest.raises(ValidationError):
            ToeplitzSeed.from_hex("zz")

    def test_shift_structure(self, rng):
        for n_in, n_out in [(5, 3), (8, 8), (13, 4)]:
            _, seed = random_case(rng, n_in, n_out)
            T = seed.matrix(n_in, n_out)
            for i in range(1, n_out):
                for j in range(1, n_in):
                    assert T[i, j] == T[i - 1, j - 1]

    def test_first_row_and_column(self):
        seed = ToeplitzSeed(np.array([1, 0, 1, 1, 0]))
        T = seed.matrix(4, 2)
        assert T[0].tolist() == [0, 1, 1, 0]
        assert T[:, 0][::-1].tolist() == [1, 0]


class TestExtract:
    """Test cases for extraction."""

    def test_zero_seed(self, rng):
        x = rng.integers(0, 2, size=32)
        seed = ToeplitzSeed(np.zeros(32 + 8 - 1, dtype=np.uint8))
        assert extract(x, seed, 8).tolist() == [0] * 8

    def test_one_by_one(self):
        assert extract([1], ToeplitzSeed(np.array([1])), 1).tolist() == [1]

    def test_hand_computed(self):
        # T = [[0, 1, 1, 0], [1, 0, 1, 1]]
        seed = ToeplitzSeed(np.array([1, 0, 1, 1, 0]))
        x = [1, 1, 0, 1]
        expected = [(0 + 1 + 0 + 0) % 2, (1 + 0 + 0 + 1) % 2]
        assert extract(x, seed, 2).tolist() == expected
        assert extract_naive(x, seed, 2).tolist() == expected

    def test_fast_matches_naive(self, rng):
        for _ in range(100):
            n_in = int(rng.integers(1, 4097))
            n_out = int(rng.integers(0, min(n_in, 64) + 1))
            x, seed = random_case(rng, n_in, n_out)
            assert np.array_equal(extract(x, seed, n_out), extract_naive(x, seed, n_out))

    def test_block_boundaries(self, rng):
        x, seed = random_case(rng, 600, 300)
        assert np.array_equal(
            extract(x, seed, 300, block_rows=7), extract_naive(x, seed, 300)
        )

    def test_linearity(self, rng):
        n_in, n_out = 256, 40
        _, seed = random_case(rng, n_in, n_out)
        for _ in range(100):
            x = rng.integers(0, 2, size=n_in)
            y = rng.integers(0, 2, size=n_in)
            assert np.array_equal(
                extract(x ^ y, seed, n_out),
                extract(x, seed, n_out) ^ extract(y, seed, n_out),
            )

    def test_deterministic(self, rng):
        x, seed = random_case(rng, 100, 20)
        assert np.array_equal(extract(x, seed, 20), extract(x, seed, 20))

    def test_empty_output(self, rng):
        x, seed = random_case(rng, 16, 0)
        assert extract(x, seed, 0).size == 0

    def test_seed_length_mismatch(self, rng):
        x, seed = random_case(rng, 16, 4)
        with pytest.raises(ValidationError):
            extract(x, seed, 5)

    def test_output_longer_than_input(self, rng):
        seed = ToeplitzSeed.random(9, rng)
        with pytest.raises(ValidationError):
            extract([1, 0, 1], seed, 7)


class TestEncoding:
    """Test cases for raw-string encodings and files."""

    def test_trits(self):
        bits = encode_trits([Outcome.ZERO, Outcome.ONE, Outcome.VOID])
        assert bits.tolist() == [0, 0, 0, 1, 1, 0]

    def test_semi_di_input(self):
        assert raw_to_bits([Outcome.VOID], Mode.SEMI_DI).tolist() == [1, 0]

    def test_fully_di_input(self):
        assert raw_to_bits([Outcome.ONE, Outcome.ZERO], Mode.FULLY_DI).tolist() == [1, 0]

    def test_fully_di_rejects_void(self):
        with pytest.raises(ValidationError):
            raw_to_bits([Outcome.VOID], Mode.FULLY_DI)

    def test_hex_output(self):
        assert bits_to_hex([1, 0, 1]) == "a0"
        assert bits_to_hex([]) == ""

    def test_files(self, tmp_path):
        (tmp_path / "raw.bin").write_bytes(bytes([0xA5]))
        assert read_bits(tmp_path / "raw.bin").tolist() == [1, 0, 1, 0, 0, 1, 0, 1]

        write_hex(tmp_path / "out.hex", [1, 1, 1, 1, 0, 0, 0, 0])
        assert (tmp_path / "out.hex").read_text() == "f0\n"
        assert read_bits(tmp_path / "out.hex").tolist() == [1, 1, 1, 1, 0, 0, 0, 0]
