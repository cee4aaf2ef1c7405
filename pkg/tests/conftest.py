import numpy as np
import pytest

from pntomo.gaussian import GaussianState

ALPHAS = (0.0, 0.5 + 0.3j, -1.0)


def random_valid_sigma(rng, extra=(0.0, 1.0)):
    """One-mode covariance: a rotated, squeezed, thermal block with det > 1/4."""
    nbar = rng.uniform(*extra)
    r = rng.uniform(0.0, 0.8)
    phi = rng.uniform(0, np.pi)
    rot = np.array([[np.cos(phi), -np.sin(phi)], [np.sin(phi), np.cos(phi)]])
    base = np.diag([np.exp(2 * r), np.exp(-2 * r)]) * (nbar + 0.5)
    return rot @ base @ rot.T


def random_state(rng, nbar=(0.0, 1.0), mean=1.0):
    sigma = random_valid_sigma(rng, nbar)
    mq, mp = rng.uniform(-mean, mean, 2)
    return GaussianState([mq], [mp], sigma)


def correlated_one_mode():
    return GaussianState([0.1], [-0.2], [[0.9, 0.2], [0.2, 0.7]])


def correlated_two_mode():
    sigma = np.array(
        [
            [0.8, 0.1, 0.15, 0.05],
            [0.1, 0.7, 0.05, 0.2],
            [0.15, 0.05, 0.9, 0.1],
            [0.05, 0.2, 0.1, 0.75],
        ]
    )
    return GaussianState([0.2, -0.1], [0.1, 0.3], sigma)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def one_mode_states():
    return {
        "thermal": GaussianState.thermal(1.0),
        "squeezed": GaussianState.squeezed(0.5, 0.7),
        "correlated": correlated_one_mode(),
    }


@pytest.fixture
def two_mode_state():
    return correlated_two_mode()
