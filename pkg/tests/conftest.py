import numpy as np
import pytest

from torusjack.symgroup import build_irrep


@pytest.fixture(scope="session")
def ir21():
    return build_irrep((2, 1))


@pytest.fixture(scope="session")
def ir31():
    return build_irrep((3, 1))


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260823)
