import numpy as np
import pytest

from conftest import qubit_chain
from sbsbound import linalg as la
from sbsbound.errors import ShapeError
from sbsbound.gram import theorem3_bound
from sbsbound.oracles import (
    bloch_grid,
    full_evolution_oracle,
    helstrom_pure,
    pure_state_trace_norm,
    qubit_pvm_grid_search,
    two_level_closed_forms,
)
from sbsbound.qsd import Ensemble, helstrom_error, knill_barnum_upper, montanaro_lower
from sbsbound.sampling import random_density, random_pure


def test_closed_forms_limits():
    assert two_level_closed_forms(coupling=1, t=3, dx=0)["gamma"] == 1
    assert helstrom_pure(0.5, 1.0) == pytest.approx(0.5)
    out = two_level_closed_forms(overlap=0.6)
    assert out["helstrom"] == pytest.approx(0.1, abs=1e-12)
    assert out["pure_trace_norm"] == pytest.approx(1.6, abs=1e-12)
    assert out["montanaro"] == pytest.approx(0.09, abs=1e-12)
    assert out["knill_barnum"] == pytest.approx(0.6, abs=1e-12)


@pytest.mark.parametrize("c", np.linspace(0, 1, 11))
@pytest.mark.parametrize("p1", [0.2, 0.5])
def test_closed_forms_agree_with_numeric(c, p1):
    a = np.array([1, 0])
    b = np.array([c, np.sqrt(1 - c * c)])
    e = Ensemble.from_pure([p1, 1 - p1], [a, b])
    out = two_level_closed_forms(overlap=c, p1=p1)
    assert helstrom_error(p1, e.states[0], 1 - p1, e.states[1]) == pytest.approx(out["helstrom"], abs=1e-10)
    assert montanaro_lower(e) == pytest.approx(out["montanaro"], abs=1e-10)
    assert knill_barnum_upper(e) == pytest.approx(out["knill_barnum"], abs=1e-7)
    assert la.trace_norm(e.states[0] - e.states[1]) == pytest.approx(pure_state_trace_norm(c), abs=1e-10)


def test_full_oracle_t0_and_all_observed():
    m = qubit_chain(n_observed=3)
    rho0 = la.kron_all([m.rho_s] + [e.initial for e in m.environments])
    assert np.allclose(full_evolution_oracle(m, 0.0), rho0)
    assert np.trace(full_evolution_oracle(m, 2.0)).real == pytest.approx(1)


def test_grid_nested():
    t1, p1 = bloch_grid(4)
    t2, p2 = bloch_grid(8)
    assert np.allclose(t2[::2], t1) and np.allclose(p2[::2], p1)
    assert len(t1) == 5 and len(p1) == 9


def test_grid_orthogonal_zero():
    e = Ensemble.from_pure([0.5, 0.5], [[1, 0], [0, 1]])
    assert qubit_pvm_grid_search(e).value == pytest.approx(0, abs=1e-12)


def test_grid_identical_converges():
    rho = random_density(np.random.default_rng(1), 2)
    e = Ensemble([0.5, 0.5], [rho, rho])
    vals = [qubit_pvm_grid_search(e, s).value for s in (30, 60, 120)]
    assert vals[0] >= vals[1] - 1e-12 >= vals[2] - 2e-12
    assert vals[0] - vals[2] <= qubit_pvm_grid_search(e, 30).slack


def test_grid_below_gram_overlap_01():
    v = [[1, 0], [0.1, np.sqrt(0.99)]]
    e = Ensemble.from_pure([0.5, 0.5], v)
    g = qubit_pvm_grid_search(e)
    res = theorem3_bound(([0.5, 0.5], v))
    assert g.value <= res.bound
    assert g.value <= res.achieved + g.slack


def test_grid_random_pure(rng):
    for _ in range(5):
        v = [random_pure(rng, 2) for _ in range(2)]
        p = rng.dirichlet([1, 1])
        g = qubit_pvm_grid_search(Ensemble.from_pure(p, v))
        assert g.value <= theorem3_bound((p, v)).achieved + g.slack


def test_grid_shape_errors():
    with pytest.raises(ShapeError):
        qubit_pvm_grid_search(Ensemble.from_pure([1.0], [[1, 0]]))
    with pytest.raises(ShapeError):
        qubit_pvm_grid_search(Ensemble.from_pure([0.5, 0.5], [[1, 0, 0], [0, 1, 0]]))
