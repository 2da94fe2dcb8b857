import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def random_hermitian(rng, d, n=None):
    shape = (d, d) if n is None else (n, d, d)
    A = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    return 0.5 * (A + np.conj(np.swapaxes(A, -1, -2)))


def oracle_sqrt(rho):
    """Square root through numpy's LAPACK eigh, independent of the package solver."""
    w, V = np.linalg.eigh(rho)
    return (V * np.sqrt(np.clip(w, 0.0, None))[..., None, :]) @ np.conj(np.swapaxes(V, -1, -2))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# a hand-written qutrit state used with frozen reference values
QUTRIT = np.array([
    [0.5, 0.1 + 0.2j, 0.05],
    [0.1 - 0.2j, 0.3, -0.1j],
    [0.05, 0.1j, 0.2],
])
