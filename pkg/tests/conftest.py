import numpy as np
import pytest

from qsysid import DynamicalParams, TangentVector, TwoLevelParams, stationary_state, two_level

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)
E01 = np.array([[0, 1], [0, 0]], dtype=complex)
E11 = np.array([[0, 0], [0, 1]], dtype=complex)


def random_hermitian(rng, d):
    A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return 0.5 * (A + A.conj().T)


def random_matrix(rng, d):
    return rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))


def random_unitary(rng, d):
    Q, R = np.linalg.qr(random_matrix(rng, d))
    return Q * (np.diagonal(R) / np.abs(np.diagonal(R)))


def random_ergodic(rng, d=2, k=1, min_gap=0.05):
    """Draw dynamical parameters until the process is ergodic with a usable gap."""
    for _ in range(50):
        D = DynamicalParams(random_hermitian(rng, d), [random_matrix(rng, d) for _ in range(k)])
        rep = stationary_state(D)
        if rep.ergodic and rep.spectral_gap > min_gap and rep.min_stationary_eigenvalue > 1e-4:
            return D, rep
    raise RuntimeError("failed to draw an ergodic parameter set")


def random_tangent(rng, d=2, k=1, scale=1.0):
    return TangentVector(
        scale * random_hermitian(rng, d),
        [scale * random_matrix(rng, d) for _ in range(k)],
    )


def random_two_level_params(rng):
    return TwoLevelParams(
        alpha=float(rng.uniform(0.6, 1.4)),
        delta=float(rng.uniform(-1.0, 1.0)),
        omega=float(rng.uniform(0.5, 1.5)),
        theta=float(rng.uniform(-np.pi, np.pi)),
    )


@pytest.fixture(scope="session")
def preset_point():
    """The worked two-level point (alpha, delta, omega, theta) = (1, 0, 1, 0)."""
    p = TwoLevelParams(1.0, 0.0, 1.0, 0.0)
    D = two_level(p)
    rep = stationary_state(D)
    assert rep.ergodic
    return p, D, rep
