import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def haar_qubit(rng):
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    return v / np.linalg.norm(v)
