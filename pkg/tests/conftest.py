import numpy as np
import pytest

from goursat.paths import RngSpec, TimeGrid


@pytest.fixture
def rng():
    return RngSpec(12345)


@pytest.fixture
def grid():
    return TimeGrid.build(1.0, dt=1e-3, eps0=1e-4)


@pytest.fixture
def gen():
    return np.random.default_rng(2024)
