import numpy as np
import pytest

from oamcomp.state import PhotonState, from_amplitudes


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_state(rng, n: int, mode: int = 0) -> PhotonState:
    """Normalized random superposition over the computational range of one mode."""
    d = 1 << n
    coeffs = rng.normal(size=d) + 1j * rng.normal(size=d)
    coeffs /= np.linalg.norm(coeffs)
    return from_amplitudes(mode, coeffs, n)
