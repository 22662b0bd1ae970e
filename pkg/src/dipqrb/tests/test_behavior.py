"""Tests for behavior tables, statistics and checks."""

import json

import numpy as np
import pytest

from dipqrb.contracts import Outcome, RoundRecord, Score
from dipqrb.exceptions import UndefinedConditioningError, ValidationError
from dipqrb.modules.behavior import (
    Behavior,
    RoundStatistics,
    accumulate,
    check_no_signalling,
    coarse_grain,
    heralded,
    read_behavior_csv,
    to_fully_di,
    write_behavior_csv,
)
from dipqrb.modules.photonic_sim import OpticalModel, exact_behavior, sample_rounds
from dipqrb.tests.conftest import OMEGA_TSIRELSON


def uniform_behavior(k: int = 2) -> Behavior:
    """Outputs uniformly random and independent of inputs."""
    table = np.zeros((2, 2, k, k))
    table[:, :, :2, :2] = 0.25
    return Behavior(table, table)


def record(i=0, s=0, x=0, y=0, z=0, a=0, b=0, c="void", t=0, d=Score.BOT) -> RoundRecord:
    return RoundRecord(i=i, s=s, x=x, y=y, z=z, a=a, b=b, c=c, t=t, d=d)


class TestBehaviorValidation:
    """Test cases for Behavior invariants."""

    def test_rejects_unnormalized(self):
        table = np.full((2, 2, 2, 2), 0.3)
        with pytest.raises(ValidationError):
            Behavior(table, table)

    def test_rejects_bad_shape(self):
        with pytest.raises(ValidationError):
            Behavior(np.full((2, 2, 4, 4), 1 / 16), np.full((2, 2, 4, 4), 1 / 16))

    def test_tables_are_read_only(self, ideal_behavior):
        with pytest.raises(ValueError):
            ideal_behavior.table0[0, 0, 0, 0] = 1.0


class TestCoarseGrain:
    """Test cases for ω, Q_z and τ_z."""

    def test_ideal(self, ideal_behavior):
        stats = coarse_grain(ideal_behavior)
        assert stats.omega == pytest.approx(OMEGA_TSIRELSON, abs=1e-10)
        assert stats.q0 == pytest.approx(0.0, abs=1e-10)
        assert stats.q1 == pytest.approx(0.0, abs=1e-10)
        assert stats.tau0 == pytest.approx(1.0, abs=1e-10)
        assert stats.tau1 == pytest.approx(1.0, abs=1e-10)
        assert stats.heralding_rate == pytest.approx(1.0, abs=1e-10)

    def test_half_client_efficiency(self):
        stats = coarse_grain(exact_behavior(OpticalModel(eta_c=0.5)))
        assert stats.tau0 == pytest.approx(0.5, abs=1e-10)
        assert stats.tau1 == pytest.approx(0.5, abs=1e-10)

    def test_uniform_outputs(self):
        """Independent uniform outputs win CHSH half the time."""
        assert coarse_grain(uniform_behavior()).omega == pytest.approx(0.5)

    def test_deterministic_strategy(self, classical_model):
        """Bob copying Alice's first basis wins three quarters of the time."""
        assert coarse_grain(exact_behavior(classical_model)).omega == pytest.approx(0.75, abs=1e-10)

    def test_undefined_conditioning(self):
        """No conclusive server outcomes leaves ω undefined."""
        table = np.zeros((2, 2, 3, 3))
        table[:, :, 2, 2] = 1.0
        with pytest.raises(UndefinedConditioningError):
            coarse_grain(Behavior(table, table))

    def test_heralding_rate(self):
        stats = coarse_grain(exact_behavior(OpticalModel(eta_a=0.8, eta_c=0.6)))
        assert stats.heralding_rate == pytest.approx(0.8, abs=1e-12)


class TestToFullyDi:
    """Test cases for the ∅ → 0 relabeling."""

    def test_all_void_becomes_zero(self):
        table = np.zeros((2, 2, 3, 3))
        table[:, :, 2, 2] = 1.0
        merged = to_fully_di(Behavior(table, table))
        assert merged.is_fully_di
        np.testing.assert_allclose(merged.table0[:, :, 0, 0], 1.0)

    def test_mass_conserved(self):
        merged = to_fully_di(exact_behavior(OpticalModel(eta_a=0.7, eta_b=0.9, eta_c=0.4)))
        np.testing.assert_allclose(merged.table0.sum(axis=(2, 3)), 1.0, atol=1e-12)
        np.testing.assert_allclose(merged.table1.sum(axis=(2, 3)), 1.0, atol=1e-12)

    def test_lossless_unchanged(self, ideal_behavior):
        merged = to_fully_di(ideal_behavior)
        np.testing.assert_allclose(merged.table0, ideal_behavior.table0[:, :, :2, :2], atol=1e-15)

    def test_idempotent(self):
        once = to_fully_di(exact_behavior(OpticalModel(eta_c=0.4)))
        twice = to_fully_di(once)
        np.testing.assert_array_equal(once.table0, twice.table0)
        np.testing.assert_array_equal(once.table1, twice.table1)

    def test_preserves_no_signalling(self):
        merged = to_fully_di(exact_behavior(OpticalModel(eta_a=0.8, eta_c=0.5)))
        assert check_no_signalling(merged, tol=1e-12).passed


class TestNoSignalling:
    """Test cases for the marginal consistency check."""

    def test_exact_behavior_passes(self, ideal_behavior):
        report = check_no_signalling(ideal_behavior, tol=1e-6)
        assert report.passed
        assert report.max_deviation < 1e-12

    def test_injected_gap(self):
        """p(a|x,y) shifted by 0.1 for y=1 is reported as a 0.1 deviation."""
        table0 = np.full((2, 2, 2, 2), 0.25)
        table0[0, 1] = [[0.35, 0.25], [0.15, 0.25]]
        table1 = np.full((2, 2, 2, 2), 0.25)
        report = check_no_signalling(Behavior(table0, table1), tol=1e-6)
        assert report.across_y == pytest.approx(0.1)
        assert report.across_z == pytest.approx(0.0)
        assert not report.passed


class TestHeralded:
    """Test cases for fair-sampling post-selection."""

    def test_conditioned_tables(self):
        behavior = exact_behavior(OpticalModel(eta_a=0.8, eta_c=0.6))
        herald = heralded(behavior)
        assert herald.herald_rate == pytest.approx(0.8, abs=1e-12)
        assert herald.table0.shape == (2, 2, 2, 2)
        assert herald.table1.shape == (2, 2, 2, 3)
        np.testing.assert_allclose(herald.table1.sum(axis=(2, 3)), 1.0, atol=1e-12)

    def test_fully_di_passes_through(self):
        merged = to_fully_di(exact_behavior(OpticalModel(eta_c=0.6)))
        assert heralded(merged).herald_rate == 1.0


class TestRoundStatistics:
    """Test cases for count accumulation."""

    def test_single_record(self):
        state = accumulate(RoundStatistics(), record(s=1, x=1, z=0, a=1, b="void", c=0))
        counts = state.counts()
        assert counts.sum() == 1
        assert counts[1, 1, 0, 0, 1, 2, 0] == 1

    def test_conservation(self):
        state = RoundStatistics()
        for i in range(25):
            accumulate(state, record(i=i, a=i % 2))
        assert state.total == 25

    def test_order_independent(self):
        records = [
            record(i=0, a=1, b=0),
            record(i=1, s=1, z=1, a=0, b="void", c=1, t=1, d=Score.OFFBASIS),
            record(i=2, x=1, y=1, a=0, b=1, t=1, d=Score.CHSH_WIN),
        ]
        forward = RoundStatistics()
        backward = RoundStatistics()
        for r in records:
            forward.add(r)
        for r in reversed(records):
            backward.add(r)
        np.testing.assert_array_equal(forward.counts(), backward.counts())
        assert forward.score_counts() == backward.score_counts()

    def test_snapshot_is_isolated(self):
        state = RoundStatistics().add(record())
        snap = state.snapshot()
        state.add(record(i=1))
        assert snap.total == 1
        assert state.total == 2

    def test_frequencies_match_exact(self, rng):
        """10⁵ simulated ideal rounds reproduce the table within TV 0.02."""
        model = OpticalModel(eta_c=0.8)
        n = 100_000
        s, x, y, z = (rng.integers(0, 2, n) for _ in range(4))
        a, b, c = sample_rounds(model, rng, s, x, y, z)
        state = RoundStatistics().add_arrays(s, x, y, z, a, b, c)

        empirical = state.to_behavior()
        exact = exact_behavior(model)
        pairs = ((empirical.table0, exact.table0), (empirical.table1, exact.table1))
        for table, reference in pairs:
            distance = 0.5 * np.abs(table - reference).sum(axis=(2, 3)).max()
            assert distance < 0.02

    def test_to_behavior_requires_all_inputs(self):
        with pytest.raises(UndefinedConditioningError):
            RoundStatistics().add(record()).to_behavior()

    def test_jsonl_export(self):
        state = RoundStatistics()
        state.add(record(a=0, b=1, t=1, d=Score.CHSH_WIN))
        state.add(record(i=1, s=1, a="void", b="void", c=0))
        lines = [json.loads(line) for line in state.to_jsonl().splitlines()]

        cells = [line for line in lines if "count" in line and "score" not in line]
        assert {cell["c"] for cell in cells} == {"void", "0"}
        scores = {line["score"]: line["frequency"] for line in lines if "score" in line}
        assert scores["chsh_win"] == 0.5
        assert scores["bot"] == 0.5


class TestBehaviorCsv:
    """Test cases for CSV import/export."""

    def test_binary_round_trip(self, tmp_path):
        merged = to_fully_di(exact_behavior(OpticalModel(eta_c=0.6)))
        path = tmp_path / "fdi.csv"
        write_behavior_csv(merged, path)
        loaded = read_behavior_csv(path)
        assert loaded.is_fully_di
        np.testing.assert_allclose(loaded.table1, merged.table1, atol=1e-15)

    def test_void_labels(self, tmp_path):
        path = tmp_path / "b.csv"
        write_behavior_csv(exact_behavior(OpticalModel()), path)
        first_row = path.read_text().splitlines()[1]
        assert first_row.split(",")[3] == ""
        assert first_row.split(",")[6] == Outcome.VOID.label

    def test_rejects_bad_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("foo,bar\n1,2\n")
        with pytest.raises(ValidationError):
            read_behavior_csv(path)
