import numpy as np
import pytest

from spreadmux.codes import LfsrSpec, msequence_code
from spreadmux.optics import FbgSpec
from spreadmux.signal import TimeGrid


@pytest.fixture
def grid31() -> TimeGrid:
    """Small single-bin grid, S = 31, fast enough for exhaustive checks."""
    return TimeGrid(bin_duration=1.0, chips_per_bin=31, samples_per_chip=4)


@pytest.fixture
def grid31_2bins() -> TimeGrid:
    return TimeGrid(bin_duration=1.0, chips_per_bin=31, samples_per_chip=4, n_bins=2)


@pytest.fixture
def code5():
    """Base m-sequence for n = 5 registers (31 chips)."""
    return msequence_code(LfsrSpec(5))


@pytest.fixture
def fbg() -> FbgSpec:
    return FbgSpec(sigma_filt=8.0)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(987654321)
