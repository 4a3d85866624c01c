import numpy as np
import pytest

from src.core.box import Box
from src.core.expsum import ExpSum


@pytest.fixture
def two_terms():
    """1 + e^z: zeros at iπ(2j + 1), skeleton the line Re z = 0."""
    return ExpSum([0, 0], [0, 1])


@pytest.fixture
def triangle():
    """1 + e^z + e^{iz}, exponents {0, 1, i}."""
    return ExpSum([0, 0, 0], [0, 1, 1j])


@pytest.fixture
def strip():
    return Box.planar(-1, -7, 1, 7)


@pytest.fixture
def rng():
    return np.random.default_rng(0)
