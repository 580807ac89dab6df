import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20241016)


def complex_gaussian(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


@pytest.fixture
def cgauss(rng):
    def draw(*shape):
        return complex_gaussian(rng, *shape)

    return draw
