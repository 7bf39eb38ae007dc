import numpy as np
import pytest
from hypothesis import settings

from tropos.weil import find_zero_table, load_zeros

settings.register_profile("tropos", deadline=None, max_examples=60, derandomize=True)
settings.load_profile("tropos")


@pytest.fixture(scope="session")
def zeros():
    return load_zeros(find_zero_table("zeros_1000.txt"))


@pytest.fixture
def rng():
    return np.random.default_rng(20240531)
