import numpy as np
import pytest

from nlgdo.kernels import PhysParams
from nlgdo.numerics import FullLine, HalfLine, make_grid


@pytest.fixture
def params():
    return PhysParams()


@pytest.fixture(scope="session")
def osc_grid():
    return make_grid(FullLine(12.0), 400)


@pytest.fixture(scope="session")
def half_grid():
    return make_grid(HalfLine(10.0), 120)


@pytest.fixture
def rng():
    return np.random.default_rng(7)
