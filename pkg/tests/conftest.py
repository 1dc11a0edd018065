import numpy as np
import pytest
from hypothesis import settings

from measures import EmpiricalMeasure, Gaussian1D, GaussianNd, Uniform1D
from util.rng import make_stream

settings.register_profile("ci", deadline=None, max_examples=50)
settings.load_profile("ci")


@pytest.fixture
def uniform():
    return Uniform1D(0.0, 1.0)


@pytest.fixture
def gauss():
    return Gaussian1D(0.0, 1.0)


@pytest.fixture
def gauss2d():
    return GaussianNd([0.0, 0.0], np.eye(2))


@pytest.fixture
def two_atoms():
    return EmpiricalMeasure([0.0, 1.0])


@pytest.fixture
def stream():
    return make_stream(12345, 1)
