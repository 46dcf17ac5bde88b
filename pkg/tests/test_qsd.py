import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sbsbound import linalg as la
from sbsbound.errors import ArityError, CapabilityError, PreconditionError, ShapeError, ValidationError
from sbsbound.oracles import helstrom_pure
from sbsbound.qsd import (
    POVM,
    PVM,
    Ensemble,
    SBSState,
    helstrom_error,
    is_vacuous,
    knill_barnum_upper,
    measurement_channel,
    montanaro_lower,
    probability_error,
    pvm_objective,
    sbs_local_reduction,
    sbs_nondisturbance_check,
)
from sbsbound.sampling import random_density, random_pure

seeds = st.integers(0, 2**32 - 1)


def pair(c):
    return Ensemble.from_pure([0.5, 0.5], [[1, 0], [c, np.sqrt(1 - c * c)]])


def test_overlap_06_sandwich():
    e = pair(0.6)
    assert montanaro_lower(e) == pytest.approx(0.09, abs=1e-10)
    assert helstrom_error(0.5, e.states[0], 0.5, e.states[1]) == pytest.approx(0.1, abs=1e-10)
    assert knill_barnum_upper(e) == pytest.approx(0.6, abs=1e-10)


def test_helstrom_limits():
    rho = np.diag([1.0, 0.0])
    assert helstrom_error(0.3, rho, 0.7, rho) == pytest.approx(0.3)
    assert helstrom_error(0.5, rho, 0.5, np.diag([0.0, 1.0])) == pytest.approx(0)
    with pytest.raises(ValidationError):
        helstrom_error(0.5, rho, 0.6, rho)


@settings(max_examples=50, deadline=None)
@given(seeds, st.integers(2, 6), st.floats(0.01, 0.99))
def test_sandwich_random_mixed(seed, d, p):
    rng = np.random.default_rng(seed)
    e = Ensemble([p, 1 - p], [random_density(rng, d, int(rng.integers(1, d + 1))) for _ in range(2)])
    h = helstrom_error(p, e.states[0], 1 - p, e.states[1])
    assert montanaro_lower(e) <= h + 1e-9
    assert h <= knill_barnum_upper(e) + 1e-9


@settings(max_examples=30, deadline=None)
@given(seeds, st.floats(0.05, 0.95))
def test_helstrom_pure_closed_form(seed, p):
    rng = np.random.default_rng(seed)
    a, b = random_pure(rng, 3), random_pure(rng, 3)
    h = helstrom_error(p, la.projector(a), 1 - p, la.projector(b))
    assert h == pytest.approx(helstrom_pure(p, np.vdot(a, b)), abs=1e-10)


def test_knill_barnum_vacuous_flag():
    e = Ensemble.from_pure(np.ones(4) / 4, [[1, 0]] * 4)
    kb = knill_barnum_upper(e)
    assert kb >= 1 and is_vacuous(kb)


def test_probability_error_and_arity():
    e = pair(0.0)
    pvm = PVM(np.array([np.diag([1, 0]), np.diag([0, 1])]))
    assert probability_error(e, pvm) == pytest.approx(0)
    with pytest.raises(ArityError):
        probability_error(e, POVM([np.eye(2)]))
    with pytest.raises(ShapeError):
        probability_error(e, POVM([np.eye(3) / 2, np.eye(3) / 2]))


def test_povm_validation():
    with pytest.raises(ValidationError):
        POVM([np.diag([1, 0]), np.diag([0, 0.5])])
    with pytest.raises(ValidationError):
        POVM([np.diag([1.5, 0]), np.diag([-0.5, 1])])
    with pytest.raises(ValidationError):
        PVM(np.array([np.diag([1, 0]), np.full((2, 2), 0.5)]))
    with pytest.raises(ValidationError):
        PVM(np.array([np.diag([0.5, 0])]))


def test_measurement_channel_needs_kraus():
    ops = np.array([np.diag([1, 0]), np.diag([0, 1])])
    with pytest.raises(CapabilityError):
        measurement_channel(np.eye(2) / 2, POVM(ops))
    out = measurement_channel(np.full((2, 2), 0.5), POVM.from_kraus(ops))
    assert np.allclose(out, np.eye(2) / 2)


def test_pvm_remainder_is_extra_outcome():
    pvm = PVM(np.array([np.diag([1, 0, 0])]))
    assert np.allclose(pvm.remainder, np.diag([0, 1, 1]))
    assert len(pvm.to_povm()) == 2


def test_pvm_objective_zero_on_orthogonal():
    states = [np.diag([1, 0]), np.diag([0, 1])]
    assert pvm_objective([0.5, 0.5], states, states) == 0


def exact_sbs(rng, n_env=2):
    probs = rng.dirichlet(np.ones(2))
    envs = []
    for _ in range(n_env):
        a = random_density(rng, 2)
        b = random_density(rng, 2)
        envs.append([np.kron(a, np.diag([1, 0])), np.kron(b, np.diag([0, 1]))])
    return SBSState(probs, envs)


def test_sbs_checks():
    rng = np.random.default_rng(7)
    s = exact_sbs(rng)
    assert s.is_exact()
    assert sbs_nondisturbance_check(s) <= 1e-8
    loc = sbs_local_reduction(s, 1)
    assert helstrom_error(loc.weights[0], loc.states[0], loc.weights[1], loc.states[1]) <= 1e-9
    with pytest.raises(IndexError):
        sbs_local_reduction(s, 2)


def test_sbs_precondition():
    s = SBSState([0.5, 0.5], [[np.eye(2) / 2, np.diag([1, 0])]])
    assert not s.is_exact()
    with pytest.raises(PreconditionError):
        sbs_nondisturbance_check(s)


def test_sbs_branch_count():
    with pytest.raises(ShapeError):
        SBSState([0.5, 0.5], [[np.eye(2) / 2]])
