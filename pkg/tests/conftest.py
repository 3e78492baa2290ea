import numpy as np
import pytest

from qutrit_ctrl import ControlGrid, SystemParams, build_generators


# parameters and states of the first steering scenario, used all over
REF_PARAMS = SystemParams(E2=1.0, E3=2.5, V13=1.0, V23=1.7, C13=0.5, C23=0.3)
RHO0_51 = np.diag([0.8, 0.0, 0.2]).astype(complex)
TARGET_51 = np.diag([0.5, 0.3, 0.2]).astype(complex)


@pytest.fixture
def ref_gens():
    return build_generators(REF_PARAMS)


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


def random_grid(rng, T=0.5, N=30, u_scale=2.0, n_scale=1.0) -> ControlGrid:
    """Random admissible control grid (interior of the usual boxes)."""
    return ControlGrid(T,
                       rng.uniform(-u_scale, u_scale, N),
                       rng.uniform(0.0, n_scale, N),
                       rng.uniform(0.0, n_scale, N))


def random_density_matrix(rng) -> np.ndarray:
    """Random full-rank density matrix (Wishart-style)."""
    G = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    W = G @ G.conj().T + 1e-3 * np.eye(3)
    return W / np.trace(W).real
