"""Brute-force references: full-space evolution, qubit PVM grid search, closed forms.

These deliberately avoid the factored code paths in :mod:`sbsbound.dynamics`
and :mod:`sbsbound.gram` so that agreement between the two is meaningful.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from . import linalg as la
from .dynamics import VonNeumannModel
from .errors import ShapeError
from .qsd import Ensemble

DEFAULT_GRID_STEPS = 180


def full_hamiltonian(m: VonNeumannModel, cap: int = la.DEFAULT_CAP) -> np.ndarray:
    """``X (x) sum_k g_k B_k`` on the system and all environments."""
    dims = m.full_dims
    la.check_cap(int(np.prod(dims)), cap)
    h_env = sum(
        env.coupling * la.embed(env.generator, k, dims[1:], cap) for k, env in enumerate(m.environments)
    )
    return np.kron(np.diag(m.x), h_env)


def full_evolution_oracle(m: VonNeumannModel, t: float, cap: int = la.DEFAULT_CAP) -> np.ndarray:
    """Evolve the full product state with ``exp(-itH)``, then trace out unobserved environments."""
    dims = m.full_dims
    rho0 = la.kron_all([m.rho_s] + [env.initial for env in m.environments], cap)
    u = la.unitary_exp(full_hamiltonian(m, cap), t)
    rho_t = u @ rho0 @ u.conj().T
    return la.partial_trace(rho_t, dims, range(m.n_observed + 1))


@dataclass(frozen=True)
class OracleResult:
    """Grid-search minimum with its argmin and an a-priori error allowance.

    ``slack`` bounds ``value - true_minimum``: the objective is 1-Lipschitz in
    the geodesic Bloch-sphere distance, and every point is within ``step``
    radians of the grid.
    """

    value: float
    argmin: tuple[float, float]
    step: float
    slack: float


def bloch_grid(steps: int = DEFAULT_GRID_STEPS):
    """Polar angles ``j pi/steps`` (j = 0..steps) and azimuths ``l pi/steps`` (l = 0..2 steps).

    Doubling ``steps`` yields a superset of the grid.
    """
    j = np.arange(steps + 1)
    l = np.arange(2 * steps + 1)
    return j * np.pi / steps, l * np.pi / steps


def bloch_projector(theta: float, phi: float) -> np.ndarray:
    n = np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])
    return la.projector(n)


def qubit_pvm_grid_search(e: Ensemble, steps: int = DEFAULT_GRID_STEPS) -> OracleResult:
    """Minimize ``sum_i p_i ||rho_i - P_i rho_i P_i||_1`` over rank-one qubit PVMs.

    The default ``steps=180`` is a 181 x 361 grid (1 degree spacing).
    """
    if e.dim != 2 or len(e) != 2:
        raise ShapeError("grid search needs an ensemble of two qubit states")
    thetas, phis = bloch_grid(steps)
    vals = kernels.pvm_grid_objective(e.states, e.weights, thetas, phis)
    a, b = np.unravel_index(np.argmin(vals), vals.shape)
    step = np.pi / steps
    return OracleResult(float(vals[a, b]), (float(thetas[a]), float(phis[b])), step, step)


# -- closed forms ---------------------------------------------------------------


def gamma_sigma_z_plus(coupling: float, t: float, dx: float) -> float:
    """Decoherence factor for ``B = sigma_z``, initial ``|+>``: ``cos(g t dx)``."""
    return float(np.cos(coupling * t * dx))


def helstrom_pure(p1: float, overlap: complex) -> float:
    """Minimum error for two pure states: ``(1 - sqrt(1 - 4 p1 p2 |c|^2)) / 2``."""
    p2 = 1.0 - p1
    return 0.5 * (1.0 - np.sqrt(max(0.0, 1.0 - 4.0 * p1 * p2 * abs(overlap) ** 2)))


def pure_state_trace_norm(overlap: complex) -> float:
    """``|| |psi><psi| - |phi><phi| ||_1 = 2 sqrt(1 - |<psi|phi>|^2)``."""
    return 2.0 * np.sqrt(max(0.0, 1.0 - abs(overlap) ** 2))


def gram_residual_trace_norm(r: float) -> float:
    """``||psi psi^+ - P psi psi^+ P||_1 = r sqrt(4 - 3 r^2)`` for a unit vector ``psi``,
    any orthogonal projector ``P``, and ``r = ||(1 - P) psi||``."""
    return r * np.sqrt(4.0 - 3.0 * r * r)


def two_level_closed_forms(**params) -> dict[str, float]:
    """Evaluate every closed form whose parameters are supplied."""
    out = {}
    if {"coupling", "t", "dx"} <= params.keys():
        out["gamma"] = gamma_sigma_z_plus(params["coupling"], params["t"], params["dx"])
    if "overlap" in params:
        c, p1 = abs(params["overlap"]), params.get("p1", 0.5)
        out["helstrom"] = helstrom_pure(p1, c)
        out["pure_trace_norm"] = pure_state_trace_norm(c)
        out["montanaro"] = p1 * (1 - p1) * c**2
        out["knill_barnum"] = 2 * np.sqrt(p1 * (1 - p1)) * c
    if "residual" in params:
        out["gram_residual"] = gram_residual_trace_norm(params["residual"])
    return out
