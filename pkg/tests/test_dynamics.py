import warnings

import numpy as np
import pytest

from conftest import PLUS, SIGMA_Z, qubit_chain, random_model
from sbsbound import linalg as la
from sbsbound.dynamics import (
    DegenerateSpectrumWarning,
    Environment,
    VonNeumannModel,
    channel_decomposition_check,
    decoherence_matrix,
    diag_state,
    gamma,
    gamma_total,
    reduced_state,
    sbs_approximant,
)
from sbsbound.errors import DegeneracyError, DimensionLimitError, ShapeError, ValidationError
from sbsbound.oracles import full_evolution_oracle, gamma_sigma_z_plus
from sbsbound.sampling import random_density


@pytest.mark.parametrize("t", [0.0, 0.37, 1.0, 4.2])
def test_gamma_closed_form(t):
    m = qubit_chain()
    for k, g in enumerate((1.0, 0.7, 1.3)):
        assert gamma(m, k, 0, 1, t).real == pytest.approx(gamma_sigma_z_plus(g, t, 2.0), abs=1e-12)
        assert abs(gamma(m, k, 0, 1, t).imag) < 1e-12


def test_gamma_total_uses_traced_only():
    m = qubit_chain(n_observed=1)
    t = 0.8
    expected = 2 * 0.5 * abs(np.cos(0.7 * t * 2) * np.cos(1.3 * t * 2))
    assert gamma_total(m, t) == pytest.approx(expected, abs=1e-12)
    all_obs = qubit_chain(n_observed=3)
    assert gamma_total(all_obs, t) == pytest.approx(1.0)


def test_reduced_state_matches_oracle(rng):
    for _ in range(5):
        m = random_model(rng)
        t = rng.uniform(0, 5)
        rho = reduced_state(m, t).assemble()
        assert la.trace_distance(rho, full_evolution_oracle(m, t)) <= 1e-10
        assert np.trace(rho).real == pytest.approx(1)


def test_t0_is_initial_state():
    m = qubit_chain()
    rho = reduced_state(m, 0.0).assemble()
    assert np.allclose(rho, np.kron(m.rho_s, m.environments[0].initial))


def test_channel_decomposition(rng):
    m = random_model(rng)
    assert channel_decomposition_check(m, 1.3) <= 1e-10


def test_diag_state_and_gamma_bound(rng):
    for _ in range(5):
        m = random_model(rng)
        t = rng.uniform(0, 5)
        full = reduced_state(m, t).assemble()
        diag = diag_state(m, t).assemble()
        assert np.trace(diag).real == pytest.approx(1)
        assert la.trace_norm(full - diag) <= gamma_total(m, t) + 1e-8


def test_decoherence_matrix_hermitian(rng):
    m = random_model(rng)
    g = decoherence_matrix(m, 0.9)
    assert np.allclose(g, g.conj().T)
    assert np.allclose(np.diag(g), 1)


def test_degenerate_x_warns():
    with pytest.warns(DegenerateSpectrumWarning):
        VonNeumannModel([1, 1], np.eye(2) / 2, (Environment.pure(SIGMA_Z, 1, PLUS),), 1)


def test_model_validation():
    env = Environment.pure(SIGMA_Z, 1, PLUS)
    with pytest.raises(ShapeError):
        VonNeumannModel([1, -1, 0], np.eye(2) / 2, (env,), 1)
    with pytest.raises(ValidationError):
        VonNeumannModel([1, -1], np.eye(2) / 2, (env,), 2)
    with pytest.raises(ShapeError):
        Environment(np.eye(3), 1, np.eye(2) / 2)
    with pytest.raises(ValidationError):
        Environment(SIGMA_Z, 1, np.eye(2) / 2, ([0.5, 0.5], [[1, 0], [1, 0]]))


def test_assembly_cap():
    m = qubit_chain(n_observed=3)
    with pytest.raises(DimensionLimitError):
        reduced_state(m, 1.0).assemble(cap=8)


def test_approximant_orthogonal_branches():
    # at g t = pi/4 the two branch vectors of sigma_z on |+> are orthogonal
    m = qubit_chain(couplings=(1.0, 0.7), n_observed=1)
    t = np.pi / 4
    a = sbs_approximant(m, t)
    assert a.normalizer == pytest.approx(1)
    s = a.sbs_state()
    assert s.is_exact()
    assert la.trace_norm(diag_state(m, t).assemble() - a.normalized()) <= 1e-10


def test_approximant_degenerate_at_zero():
    m = qubit_chain()
    with pytest.raises(DegeneracyError) as info:
        sbs_approximant(m, 0.0)
    assert info.value.environment == 0 and info.value.time == 0.0
    a = sbs_approximant(m, 0.0, allow_dependent=True)
    assert a.degenerate
    assert 0 < a.normalizer <= 1


def test_approximant_normalizer_range(rng):
    for _ in range(5):
        m = random_model(rng, pure_observed=True)
        a = sbs_approximant(m, rng.uniform(0.1, 5), allow_dependent=True)
        assert 0 <= a.normalizer <= 1 + 1e-12
        assert np.trace(a.unnormalized()).real == pytest.approx(a.normalizer)


def test_mixed_environment_block_pvm():
    rng = np.random.default_rng(11)
    from sbsbound.sampling import random_hermitian, random_pure

    env = Environment.mixture(random_hermitian(rng, 4), 1.0, [0.6, 0.4], [random_pure(rng, 4), random_pure(rng, 4)])
    m = VonNeumannModel([1, -1], np.eye(2) / 2, (env,), 1)
    a = sbs_approximant(m, 1.0)
    ep = a.env_pvms[0]
    assert ep.mixed_index is not None
    assert [np.trace(p).real for p in ep.pvm.projectors] == pytest.approx([2, 2])


def test_custom_strategy_shape():
    m = qubit_chain()
    with pytest.raises(ShapeError):
        sbs_approximant(m, 1.0, strategy=[])
    a = sbs_approximant(m, 1.0, strategy=[np.array([np.diag([1, 0]), np.diag([0, 1])])])
    assert a.strategy == "custom"


def test_support_strategy_requires_orthogonal():
    m = qubit_chain()
    with pytest.raises(ValidationError):
        sbs_approximant(m, 1.0, strategy="support")
    m2 = VonNeumannModel([1, -1], np.eye(2) / 2, (Environment(SIGMA_Z, 1.0, random_density(np.random.default_rng(0), 2)),), 1)
    with pytest.raises(ValidationError):
        sbs_approximant(m2, 1.0, strategy="support")


def test_diagonal_rho_s_has_no_gamma():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        m = qubit_chain(rho_s=np.diag([0.3, 0.7]))
    assert gamma_total(m, 2.0) == 0
