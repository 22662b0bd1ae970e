"""Test configuration."""

import numpy as np
import pytest

from dipqrb.modules.photonic_sim import OpticalModel, exact_behavior

OMEGA_TSIRELSON = (2 + np.sqrt(2)) / 4


@pytest.fixture
def ideal_model() -> OpticalModel:
    """Default angles, lossless detectors."""
    return OpticalModel()


@pytest.fixture
def ideal_behavior(ideal_model):
    """Exact behavior of the ideal model."""
    return exact_behavior(ideal_model)


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator."""
    return np.random.default_rng(12345)


@pytest.fixture
def classical_model() -> OpticalModel:
    """Bob measures in Alice's first basis for both inputs (ω = 0.75)."""
    return OpticalModel(angles_b=(0.0, 0.0))
