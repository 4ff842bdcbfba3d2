import numpy as np
import pytest

from wsp.fields import Grid


@pytest.fixture
def grid2():
    return Grid(2, 4.0, 32)


@pytest.fixture
def grid3():
    return Grid(3, 2.0, 16)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
