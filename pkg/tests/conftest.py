import numpy as np
import pytest

from mcrsp.statevec import StateVector


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def random_unitary(rng):
    """Haar-ish random unitary via QR of a complex Gaussian matrix."""
    def make(dim):
        mat = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        q, r = np.linalg.qr(mat)
        d = np.diag(r)
        return q * (d / np.abs(d))
    return make


@pytest.fixture
def random_state(rng):
    def make(labels):
        dim = 2 ** len(labels)
        amps = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        return StateVector(labels, amps / np.linalg.norm(amps))
    return make
