import numpy as np
import pytest

from sparse_hinf import GeneralizedPlant, StateSpace, zoh_discretize
from sparse_hinf.demos import ex1, ex2, ex3


@pytest.fixture(scope="session")
def bundle1():
    return ex1()


@pytest.fixture(scope="session")
def bundle2():
    return ex2()


@pytest.fixture(scope="session")
def bundle3():
    return ex3()


@pytest.fixture(scope="session")
def plant1_d(bundle1):
    return zoh_discretize(bundle1.plant_ct, bundle1.ts)


@pytest.fixture(scope="session")
def plant2_d(bundle2):
    return zoh_discretize(bundle2.plant_ct, bundle2.ts)


@pytest.fixture(scope="session")
def plant3_d(bundle3):
    return zoh_discretize(bundle3.plant_ct, bundle3.ts)


def random_stable_discrete(rng, nx, nw=None, nz=None, radius=0.9, ts=1.0) -> StateSpace:
    """Random Schur-stable system with spectral radius below ``radius``."""
    nw = nw if nw is not None else int(rng.integers(1, 3))
    nz = nz if nz is not None else int(rng.integers(1, 3))
    A = rng.standard_normal((nx, nx))
    rho = max(np.abs(np.linalg.eigvals(A)).max(), 1e-6)
    A *= radius * rng.uniform(0.3, 1.0) / rho
    B = rng.standard_normal((nx, nw))
    C = rng.standard_normal((nz, nx))
    D = 0.3 * rng.standard_normal((nz, nw))
    return StateSpace(A, B, C, D, ts=ts)


def random_plant(rng, nx=3, nw=2, nu=2, nz=2, ny=2, ts=1.0, stable=True) -> GeneralizedPlant:
    A = rng.standard_normal((nx, nx))
    if stable:
        rho = max(np.abs(np.linalg.eigvals(A)).max(), 1e-6)
        A *= 0.8 / rho
    return GeneralizedPlant(
        A,
        rng.standard_normal((nx, nw)),
        rng.standard_normal((nx, nu)),
        rng.standard_normal((nz, nx)),
        rng.standard_normal((ny, nx)),
        0.2 * rng.standard_normal((nz, nw)),
        rng.standard_normal((nz, nu)),
        rng.standard_normal((ny, nw)),
        np.zeros((ny, nu)),
        ts=ts,
    )
