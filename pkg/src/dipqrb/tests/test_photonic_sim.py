"""Tests for the photonic simulation."""

import numpy as np
import pydantic
import pytest

from dipqrb.contracts import Outcome
from dipqrb.exceptions import ValidationError
from dipqrb.modules.behavior import (
    check_no_signalling,
    coarse_grain,
    read_behavior_csv,
    to_fully_di,
)
from dipqrb.modules.photonic_sim import (
    OpticalModel,
    TwoQubitState,
    dump_behavior_csv,
    exact_behavior,
    ideal_pair_state,
    measurement_effects,
    sample_client_outcome,
    sample_round,
    sample_rounds,
    sample_server_outcomes,
)
from dipqrb.tests.conftest import OMEGA_TSIRELSON


class TestPairState:
    """Test cases for the entangled pair state."""

    def test_amplitudes(self):
        """The ideal state is (HH + VV)/√2."""
        state = ideal_pair_state()
        expected = np.array([1, 0, 0, 1]) / np.sqrt(2)
        np.testing.assert_allclose(state.coefficients, expected, atol=1e-15)

    def test_normalized(self):
        state = ideal_pair_state()
        assert state.overlap(state) == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal_to_other_bell_state(self):
        """Overlap with (HV + VH)/√2 vanishes."""
        other = TwoQubitState(np.array([0, 1, 1, 0], dtype=complex) / np.sqrt(2))
        assert abs(ideal_pair_state().overlap(other)) < 1e-15

    def test_rejects_unnormalized(self):
        with pytest.raises(ValidationError):
            TwoQubitState(np.array([1, 0, 0, 1], dtype=complex))


class TestMeasurementEffects:
    """Test cases for lossy polarization POVMs."""

    def test_lossless_computational_basis(self):
        """Angle 0 and eta 1 give |H><H|, |V><V| and 0."""
        zero, one, void = measurement_effects(0.0, 1.0)
        np.testing.assert_allclose(zero, np.diag([1, 0]), atol=1e-15)
        np.testing.assert_allclose(one, np.diag([0, 1]), atol=1e-15)
        np.testing.assert_allclose(void, np.zeros((2, 2)), atol=1e-15)

    def test_loss_effect(self):
        """eta 0.6 leaves 0.4·I for ∅."""
        void = measurement_effects(0.0, 0.6)[2]
        np.testing.assert_allclose(void, 0.4 * np.eye(2), atol=1e-15)

    def test_completeness(self):
        total = sum(measurement_effects(37.0, 0.83))
        np.testing.assert_allclose(total, np.eye(2), atol=1e-12)

    @pytest.mark.parametrize("eta", [-0.1, 1.5])
    def test_rejects_bad_efficiency(self, eta):
        with pytest.raises(ValidationError):
            measurement_effects(0.0, eta)


class TestOpticalModel:
    """Test cases for model validation and config files."""

    def test_defaults(self, ideal_model):
        assert ideal_model.angles_a == (0.0, 45.0)
        assert ideal_model.angles_b == (22.5, -22.5)
        assert ideal_model.angles_c == (0.0, 45.0)

    def test_rejects_bad_distribution(self):
        with pytest.raises(pydantic.ValidationError):
            OpticalModel(p_x=(0.5, 0.6))

    def test_rejects_bad_switch(self):
        with pytest.raises(pydantic.ValidationError):
            OpticalModel(p_switch=1.0)

    def test_config_round_trip(self, tmp_path):
        """A saved model loads back equal."""
        model = OpticalModel(eta_c=0.73, angles_b=(10.0, -35.0), p_switch=0.25)
        path = tmp_path / "model.conf"
        model.save(path)
        assert OpticalModel.load(path) == model

    def test_config_ignores_unrelated_keys(self, tmp_path):
        path = tmp_path / "run.conf"
        path.write_text("# experiment\neta_c=0.9\nrounds=1000\n")
        assert OpticalModel.load(path).eta_c == 0.9


class TestExactBehavior:
    """Test cases for the closed-form behavior."""

    def test_tsirelson_winning_probability(self, ideal_behavior):
        assert coarse_grain(ideal_behavior).omega == pytest.approx(OMEGA_TSIRELSON, abs=1e-10)

    @pytest.mark.parametrize("eta_c", [0.5, 0.7, 0.8, 1.0])
    def test_transmittivity_equals_efficiency(self, eta_c):
        stats = coarse_grain(exact_behavior(OpticalModel(eta_c=eta_c)))
        assert stats.tau0 == pytest.approx(eta_c, abs=1e-10)
        assert stats.tau1 == pytest.approx(eta_c, abs=1e-10)
        assert stats.omega == pytest.approx(OMEGA_TSIRELSON, abs=1e-10)

    @pytest.mark.parametrize("eta_c", [round(0.1 * k, 1) for k in range(1, 11)])
    def test_no_errors_in_common_bases(self, eta_c):
        stats = coarse_grain(exact_behavior(OpticalModel(eta_c=eta_c)))
        assert stats.q0 < 1e-10
        assert stats.q1 < 1e-10

    def test_completeness(self):
        behavior = exact_behavior(OpticalModel(eta_a=0.9, eta_b=0.8, eta_c=0.55))
        np.testing.assert_allclose(behavior.table0.sum(axis=(2, 3)), 1.0, atol=1e-12)
        np.testing.assert_allclose(behavior.table1.sum(axis=(2, 3)), 1.0, atol=1e-12)

    def test_fair_sampling(self):
        """No-click probabilities do not depend on the local input."""
        behavior = exact_behavior(OpticalModel(eta_a=0.9, eta_b=0.8, eta_c=0.55))
        void = int(Outcome.VOID)
        alice = behavior.table0[:, 0, void, :].sum(axis=-1)
        bob = behavior.table0[0, :, :, void].sum(axis=-1)
        charlie = behavior.table1[0, :, :, void].sum(axis=-1)
        for marginal in (alice, bob, charlie):
            assert abs(marginal[0] - marginal[1]) < 1e-12

    def test_no_signalling(self):
        behavior = exact_behavior(OpticalModel(eta_a=0.9, eta_c=0.6))
        assert check_no_signalling(behavior, tol=1e-12).max_deviation < 1e-12

    def test_client_loss_monotone(self):
        void = int(Outcome.VOID)
        losses = [
            exact_behavior(OpticalModel(eta_c=eta)).table1[0, 0, :, void].sum()
            for eta in np.linspace(0.05, 0.95, 10)
        ]
        assert all(later < earlier for earlier, later in zip(losses, losses[1:]))

    def test_csv_dump(self, tmp_path):
        """The dump reads back to the same tables."""
        model = OpticalModel(eta_c=0.6)
        path = tmp_path / "behavior.csv"
        dump_behavior_csv(model, path)

        loaded = read_behavior_csv(path)
        np.testing.assert_allclose(loaded.table0, exact_behavior(model).table0, atol=1e-15)
        np.testing.assert_allclose(loaded.table1, exact_behavior(model).table1, atol=1e-15)
        assert path.read_text().splitlines()[0] == "s,x,y,z,a,b,c,probability"


class TestSampling:
    """Test cases for Monte Carlo sampling."""

    def test_deterministic_under_seed(self, ideal_model):
        inputs = [(s, x, y, z) for s in (0, 1) for x in (0, 1) for y in (0, 1) for z in (0, 1)]
        first = np.random.default_rng(7)
        second = np.random.default_rng(7)
        assert [sample_round(ideal_model, first, *i) for i in inputs] == [
            sample_round(ideal_model, second, *i) for i in inputs
        ]

    def test_blanking(self, ideal_model, rng):
        for x in (0, 1):
            for z in (0, 1):
                _, b, _ = sample_round(ideal_model, rng, 1, x, 0, z)
                assert b is Outcome.VOID
                _, _, c = sample_round(ideal_model, rng, 0, x, z, 0)
                assert c is Outcome.VOID

    def test_vectorised_matches_exact(self, rng):
        """Empirical frequencies over 10⁶ rounds are within TV 5e-3."""
        model = OpticalModel(eta_c=0.7)
        n = 1_000_000
        x = np.zeros(n, dtype=int)
        z = np.ones(n, dtype=int)
        s = np.ones(n, dtype=int)
        a, b, c = sample_rounds(model, rng, s, x, x, z)

        assert (b == int(Outcome.VOID)).all()
        empirical = np.zeros((3, 3))
        np.add.at(empirical, (a, c), 1)
        empirical /= n
        distance = 0.5 * np.abs(empirical - exact_behavior(model).table1[0, 1]).sum()
        assert distance < 5e-3

    def test_split_sampling_reproduces_joint(self, rng):
        """Server draw then client conditional matches p(ac|xz)."""
        model = OpticalModel(eta_a=0.8, eta_c=0.6)
        n = 40_000
        counts = np.zeros((3, 3))
        for _ in range(n):
            a, _ = sample_server_outcomes(model, rng, 1, 1, 0)
            c = sample_client_outcome(model, rng, 1, 0, a)
            counts[a, c] += 1
        distance = 0.5 * np.abs(counts / n - exact_behavior(model).table1[1, 0]).sum()
        assert distance < 0.02

    def test_split_sampling_with_merged_void(self, rng):
        """Merged announcements reproduce the fully-DI table."""
        model = OpticalModel(eta_a=0.8, eta_c=0.6)
        n = 40_000
        counts = np.zeros((2, 2))
        for _ in range(n):
            a, _ = sample_server_outcomes(model, rng, 1, 0, 1)
            a = Outcome.ZERO if a is Outcome.VOID else a
            c = sample_client_outcome(model, rng, 0, 1, a, merge_void=True)
            counts[a, c] += 1
        expected = to_fully_di(exact_behavior(model)).table1[0, 1]
        assert 0.5 * np.abs(counts / n - expected).sum() < 0.02
