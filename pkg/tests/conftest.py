import numpy as np
import pytest

from loewnerlab.config import RunConfig


@pytest.fixture
def cfg():
    return RunConfig()


@pytest.fixture
def rng():
    return np.random.default_rng(11)
