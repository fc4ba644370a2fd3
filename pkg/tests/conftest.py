import numpy as np
import pytest

from boundary_ising.model import ModelParams

FOUR_POINTS = [(0.3, 0.2), (3.0, 0.2), (3.0, 5.0), (3.0, 8.0)]


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def sym(N, h, g, J=1.0):
    return ModelParams.symmetric(N, h, g, J)
