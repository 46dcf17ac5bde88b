import numpy as np
import pytest

from sbsbound import _pykernels, kernels
from sbsbound.oracles import bloch_grid
from sbsbound.sampling import random_density, random_independent_set

try:
    from sbsbound import _ckernels
except ImportError:  # extension not built
    _ckernels = None

needs_ext = pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")


def test_backend_name():
    assert kernels.BACKEND in ("cython", "python")


@pytest.mark.parametrize("drop", [-1.0, 1e-10])
def test_mgs_python(drop):
    rng = np.random.default_rng(0)
    v = random_independent_set(rng, 4, 6)
    phi, alpha, kept = _pykernels.mgs(v, drop)
    assert np.allclose(phi.conj() @ phi.T, np.eye(4), atol=1e-12)
    assert kept.all() and np.all(alpha > 0)


@needs_ext
@pytest.mark.parametrize("seed", range(5))
def test_mgs_backends_agree(seed):
    rng = np.random.default_rng(seed)
    v = random_independent_set(rng, 4, 5)
    v = np.concatenate([v, v[:1]])  # one dependent vector
    for drop in (1e-10,):
        a = _pykernels.mgs(v, drop)
        b = _ckernels.mgs(v, drop)
        assert np.allclose(a[0], b[0], atol=1e-12)
        assert np.allclose(a[1], b[1], atol=1e-12)
        assert list(a[2]) == list(b[2]) == [True] * 4 + [False]


@needs_ext
def test_grid_backends_agree():
    rng = np.random.default_rng(1)
    rhos = np.array([random_density(rng, 2), random_density(rng, 2)])
    th, ph = bloch_grid(20)
    a = _pykernels.pvm_grid_objective(rhos, np.array([0.3, 0.7]), th, ph)
    b = _ckernels.pvm_grid_objective(rhos, np.array([0.3, 0.7]), th, ph)
    assert a.shape == (21, 41)
    assert np.allclose(a, b, atol=1e-13)


def test_grid_kernel_matches_direct():
    from sbsbound import linalg as la
    from sbsbound.oracles import bloch_projector
    from sbsbound.qsd import pvm_objective

    rng = np.random.default_rng(2)
    rhos = np.array([random_density(rng, 2), random_density(rng, 2)])
    th, ph = bloch_grid(6)
    vals = kernels.pvm_grid_objective(rhos, np.array([0.4, 0.6]), th, ph)
    for a in (0, 2, 5):
        for b in (1, 7):
            p = bloch_projector(th[a], ph[b])
            direct = pvm_objective([0.4, 0.6], rhos, [p, np.eye(2) - p])
            assert vals[a, b] == pytest.approx(direct, abs=1e-12)
