import warnings

import numpy as np
import pytest

from sbsbound import linalg as la
from sbsbound.dynamics import Environment, VonNeumannModel
from sbsbound.sampling import random_density, random_hermitian, random_pure

SIGMA_Z = np.diag([1.0, -1.0])
PLUS = np.array([1.0, 1.0]) / np.sqrt(2)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def qubit_chain(couplings=(1.0, 0.7, 1.3), n_observed=1, rho_s=None):
    rho_s = la.projector(PLUS) if rho_s is None else rho_s
    envs = tuple(Environment.pure(SIGMA_Z, g, PLUS) for g in couplings)
    return VonNeumannModel([1.0, -1.0], rho_s, envs, n_observed)


def random_model(rng, d_s=None, n_env=None, mixed=False, pure_observed=False):
    """Random model with qubit/qutrit environments."""
    d_s = d_s or int(rng.integers(2, 4))
    n_env = n_env or int(rng.integers(2, 4))
    x = rng.normal(size=d_s)
    envs = []
    for k in range(n_env):
        d = int(rng.integers(2, 4))
        b = random_hermitian(rng, d)
        if pure_observed or (not mixed and rng.random() < 0.5):
            envs.append(Environment.pure(b, rng.uniform(0.3, 1.5), random_pure(rng, d)))
        else:
            envs.append(Environment(b, rng.uniform(0.3, 1.5), random_density(rng, d)))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return VonNeumannModel(x, random_density(rng, d_s), tuple(envs), int(rng.integers(1, n_env + 1)))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
