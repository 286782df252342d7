import numpy as np
import pytest

from unified_qme.scenarios import builtin_dephasing_dimer, builtin_two_qubit_three_bath

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]])
SZ = np.diag([-1.0, 1.0]).astype(complex)


def random_density(rng, d):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    r = g @ g.conj().T
    return r / np.trace(r).real


def random_hermitian(rng, d):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return 0.5 * (g + g.conj().T)


class Setup:
    """Resolved objects of a scenario spec."""

    def __init__(self, spec):
        self.spec = spec
        self.h = spec.hamiltonian()
        self.couplings = spec.coupling_operators()
        self.baths = spec.bath_descriptors()
        self.split = spec.split()
        self.rho0 = spec.initial_state()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def fig2():
    return Setup(builtin_two_qubit_three_bath())


@pytest.fixture(scope="session")
def fig2_exact():
    return Setup(builtin_two_qubit_three_bath(gamma="exact_kms"))


@pytest.fixture(scope="session")
def dimer():
    return Setup(builtin_dephasing_dimer())
