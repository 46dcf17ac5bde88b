import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from sbsbound import linalg as la
from sbsbound.errors import DimensionLimitError, ShapeError, ValidationError
from sbsbound.sampling import random_density, random_hermitian, random_pure

seeds = st.integers(0, 2**32 - 1)


def test_density_validation():
    with pytest.raises(ValidationError):
        la.as_density_matrix([[1, 1], [0, 0]])  # not Hermitian
    with pytest.raises(ValidationError):
        la.as_density_matrix(np.eye(2))  # trace 2
    with pytest.raises(ValidationError):
        la.as_density_matrix(np.diag([1.5, -0.5]))  # not PSD, rejected not clipped
    with pytest.raises(ShapeError):
        la.as_density_matrix(np.ones((2, 3)) / 2)
    with pytest.raises(ValidationError):
        la.as_density_matrix([[np.nan, 0], [0, 1]])


def test_pure_state_norm():
    with pytest.raises(ValidationError):
        la.as_pure_state([1, 1])
    v = la.as_pure_state([0.6, 0.8j])
    assert np.allclose(la.projector(v) @ la.projector(v), la.projector(v))


def test_kron_cap():
    with pytest.raises(DimensionLimitError) as info:
        la.kron_all([np.eye(4)] * 4, cap=100)
    assert info.value.cap == 100
    assert la.kron_all([np.eye(2)] * 3).shape == (8, 8)


@settings(max_examples=40, deadline=None)
@given(seeds, st.lists(st.integers(1, 3), min_size=1, max_size=3))
def test_partial_trace_of_product(seed, dims):
    rng = np.random.default_rng(seed)
    rhos = [random_density(rng, d) for d in dims]
    full = la.kron_all(rhos)
    for keep in range(len(dims)):
        assert np.allclose(la.partial_trace(full, dims, [keep]), rhos[keep], atol=1e-12)
    assert np.allclose(la.partial_trace(full, dims, range(len(dims))), full)
    with pytest.raises(ShapeError):
        la.partial_trace(full, dims, [])


def test_partial_trace_keeps_order():
    rng = np.random.default_rng(0)
    a, b, c = (random_density(rng, d) for d in (2, 3, 2))
    full = la.kron_all([a, b, c])
    assert np.allclose(la.partial_trace(full, [2, 3, 2], [2, 0]), np.kron(a, c))


def test_partial_trace_shape_error():
    with pytest.raises(ShapeError):
        la.partial_trace(np.eye(6) / 6, [2, 2], [0])


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(1, 6))
def test_trace_norm_is_nuclear_norm(seed, d):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    assert la.trace_norm(a) == pytest.approx(np.linalg.norm(a, "nuc"), rel=1e-10)
    h = random_hermitian(rng, d)
    assert la.trace_norm(h) == pytest.approx(np.abs(np.linalg.eigvalsh(h)).sum(), rel=1e-10)


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(2, 5))
def test_fidelity_properties(seed, d):
    rng = np.random.default_rng(seed)
    r, s = random_density(rng, d), random_density(rng, d)
    f = la.fidelity(r, s)
    assert 0 <= f <= 1
    assert f == pytest.approx(la.fidelity(s, r), abs=1e-9)
    assert la.fidelity(r, r) == pytest.approx(1, abs=1e-9)
    # Fuchs-van de Graaf
    td = la.trace_distance(r, s)
    assert 1 - np.sqrt(f) <= td + 1e-9
    assert td <= np.sqrt(1 - f) + 1e-9


def test_fidelity_pure_is_squared_overlap():
    rng = np.random.default_rng(3)
    a, b = random_pure(rng, 3), random_pure(rng, 3)
    assert la.fidelity(la.projector(a), la.projector(b)) == pytest.approx(abs(np.vdot(a, b)) ** 2, abs=1e-7)


def test_fidelity_orthogonal_supports():
    assert la.fidelity(np.diag([1, 0, 0]), np.diag([0, 0.5, 0.5])) == pytest.approx(0, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(1, 5), st.floats(-3, 3))
def test_unitary_exp_matches_expm(seed, d, s):
    rng = np.random.default_rng(seed)
    h = random_hermitian(rng, d)
    u = la.unitary_exp(h, s)
    assert np.allclose(u, scipy.linalg.expm(-1j * s * h), atol=1e-10)
    assert np.allclose(u @ u.conj().T, np.eye(d), atol=1e-12)


def test_herm_eig_rejects_non_hermitian():
    with pytest.raises(ValidationError):
        la.herm_eig([[0, 1], [0, 0]])


def test_embed():
    z = np.diag([1, -1])
    assert np.allclose(la.embed(z, 1, [3, 2, 2]), np.kron(np.kron(np.eye(3), z), np.eye(2)))
    with pytest.raises(ShapeError):
        la.embed(z, 0, [3, 2])


def test_support_projector():
    rho = np.diag([0.5, 0.5, 0.0])
    assert np.allclose(la.support_projector(rho), np.diag([1, 1, 0]))
