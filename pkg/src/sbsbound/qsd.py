"""Quantum state discrimination: ensembles, measurements and error bounds."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import linalg as la
from .errors import (
    ArityError,
    CapabilityError,
    PreconditionError,
    ShapeError,
    ValidationError,
)

WEIGHT_TOL = 1e-10
POVM_TOL = 1e-9
SUPPORT_TOL = 1e-10


def _as_weights(weights, n=None):
    p = np.asarray(weights, dtype=float)
    if p.ndim != 1 or (n is not None and p.shape[0] != n):
        raise ShapeError("weights must be a vector with one entry per state")
    if np.any(p < -WEIGHT_TOL) or np.any(p > 1 + WEIGHT_TOL):
        raise ValidationError("weights must lie in [0, 1]")
    if abs(p.sum() - 1.0) > WEIGHT_TOL:
        raise ValidationError(f"weights sum to {p.sum()!r}, expected 1")
    return np.clip(p, 0.0, 1.0)


@dataclass(frozen=True)
class Ensemble:
    """Weighted family of density matrices ``{(p_i, rho_i)}`` on a common space."""

    weights: np.ndarray
    states: np.ndarray  # (N, d, d)

    def __post_init__(self):
        states = [la.as_density_matrix(s) for s in self.states]
        if len({s.shape for s in states}) > 1:
            raise ShapeError("ensemble states must share one dimension")
        object.__setattr__(self, "states", np.array(states))
        object.__setattr__(self, "weights", _as_weights(self.weights, len(states)))

    @classmethod
    def from_pure(cls, weights, vectors):
        return cls(weights, [la.projector(la.as_pure_state(v, 1e-10)) for v in vectors])

    def __len__(self):
        return len(self.weights)

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    def mixture(self) -> np.ndarray:
        return np.einsum("i,ijk->jk", self.weights, self.states)


@dataclass(frozen=True)
class POVM:
    """Effects ``E_l`` resolving the identity, optionally with Kraus operators."""

    effects: np.ndarray
    kraus: np.ndarray | None = None

    def __post_init__(self):
        effects = np.array([la.as_hermitian(e, POVM_TOL) for e in self.effects])
        d = effects.shape[1]
        for e in effects:
            if np.linalg.eigvalsh(e)[0] < -la.PSD_TOL:
                raise ValidationError("POVM effect is not PSD")
        if np.max(np.abs(effects.sum(axis=0) - np.eye(d))) > POVM_TOL:
            raise ValidationError("POVM effects do not sum to the identity")
        object.__setattr__(self, "effects", effects)
        if self.kraus is not None:
            kraus = np.asarray(self.kraus, dtype=complex)
            if kraus.shape != effects.shape:
                raise ShapeError("need one Kraus operator per effect")
            for m, e in zip(kraus, effects):
                if np.max(np.abs(m.conj().T @ m - e)) > POVM_TOL:
                    raise ValidationError("Kraus operator does not match its effect")
            object.__setattr__(self, "kraus", kraus)

    @classmethod
    def from_kraus(cls, ops):
        ops = np.asarray(ops, dtype=complex)
        return cls(np.array([m.conj().T @ m for m in ops]), ops)

    def __len__(self):
        return len(self.effects)

    @property
    def dim(self) -> int:
        return self.effects.shape[1]


@dataclass(frozen=True)
class PVM:
    """Mutually orthogonal projectors plus the implicit remainder ``I - sum P_j``.

    Zero projectors are allowed (they mark outcomes that are never assigned).
    """

    projectors: np.ndarray

    def __post_init__(self):
        ps = np.array([la.as_square(p) for p in self.projectors])
        for j, p in enumerate(ps):
            if np.max(np.abs(p @ p - p)) > POVM_TOL or np.max(np.abs(p - p.conj().T)) > POVM_TOL:
                raise ValidationError(f"element {j} is not an orthogonal projector")
            for k in range(j):
                if np.max(np.abs(p @ ps[k])) > POVM_TOL:
                    raise ValidationError(f"projectors {k} and {j} are not orthogonal")
        object.__setattr__(self, "projectors", ps)
        if np.linalg.eigvalsh(0.5 * (self.remainder + self.remainder.conj().T))[0] < -POVM_TOL:
            raise ValidationError("projectors over-resolve the identity")

    @classmethod
    def from_vectors(cls, vectors):
        return cls(np.array([la.projector(v) for v in vectors]))

    @property
    def dim(self) -> int:
        return self.projectors.shape[1]

    @property
    def remainder(self) -> np.ndarray:
        return np.eye(self.dim) - self.projectors.sum(axis=0)

    def to_povm(self) -> POVM:
        ops = np.concatenate([self.projectors, self.remainder[None]])
        return POVM(ops, ops)


def _measurement(m) -> POVM:
    return m.to_povm() if isinstance(m, PVM) else m


def probability_error(e: Ensemble, m) -> float:
    """``1 - sum_i p_i Tr(E_i rho_i)`` with effect ``i`` assigned to state ``i``.

    Effects beyond the ensemble size only contribute to the error.
    """
    m = _measurement(m)
    if len(m) < len(e):
        raise ArityError(f"{len(m)} effects cannot discriminate {len(e)} states")
    if m.dim != e.dim:
        raise ShapeError("measurement and ensemble dimensions differ")
    success = sum(p * np.trace(m.effects[i] @ rho).real for i, (p, rho) in enumerate(zip(e.weights, e.states)))
    return float(min(1.0, max(0.0, 1.0 - success)))


def helstrom_error(p1: float, rho1, p2: float, rho2) -> float:
    """Minimum two-state error ``(1 - ||p1 rho1 - p2 rho2||_1) / 2``."""
    if abs(p1 + p2 - 1.0) > WEIGHT_TOL:
        raise ValidationError("priors must sum to 1")
    rho1 = la.as_density_matrix(rho1)
    rho2 = la.as_density_matrix(rho2)
    if rho1.shape != rho2.shape:
        raise ShapeError("states must share one dimension")
    return 0.5 * (1.0 - la.trace_norm(p1 * rho1 - p2 * rho2))


def pairwise_fidelities(e: Ensemble) -> np.ndarray:
    n = len(e)
    f = np.eye(n)
    for i in range(n):
        for j in range(i):
            f[i, j] = f[j, i] = la.fidelity(e.states[i], e.states[j])
    return f


def montanaro_lower(e: Ensemble) -> float:
    """Lower bound ``(1/2) sum_{i != j} p_i p_j F(rho_i, rho_j)`` on the minimum error."""
    f = pairwise_fidelities(e)
    np.fill_diagonal(f, 0.0)
    return float(0.5 * e.weights @ f @ e.weights)


def knill_barnum_upper(e: Ensemble) -> float:
    """Upper bound ``sum_{i != j} sqrt(p_i p_j F(rho_i, rho_j))`` on the minimum error.

    Reported raw; values ``>= 1`` are vacuous (see :func:`is_vacuous`).
    """
    f = pairwise_fidelities(e)
    np.fill_diagonal(f, 0.0)
    s = np.sqrt(e.weights)
    return float(s @ np.sqrt(f) @ s)


def is_vacuous(upper_bound: float) -> bool:
    return upper_bound >= 1.0


def measurement_channel(rho, m) -> np.ndarray:
    """Average post-measurement state ``sum_l M_l rho M_l^dagger``."""
    m = _measurement(m)
    if m.kraus is None:
        raise CapabilityError("measurement carries no Kraus operators")
    rho = la.as_density_matrix(rho)
    if rho.shape[0] != m.dim:
        raise ShapeError("state and measurement dimensions differ")
    return np.einsum("lab,bc,ldc->ad", m.kraus, rho, m.kraus.conj())


def pvm_objective(weights, states, projectors) -> float:
    """``sum_i p_i ||rho_i - P_i rho_i P_i||_1`` for projectors matched by index."""
    total = 0.0
    for p, rho, proj in zip(weights, states, projectors):
        total += p * la.trace_norm(rho - proj @ rho @ proj)
    return float(total)


# -- Spectrum broadcast structures -------------------------------------------


@dataclass(frozen=True)
class SBSState:
    """``sum_i p_i |i><i| (x) rho_i^{E^1} (x) ... (x) rho_i^{E^N}``.

    ``env_states[k][i]`` is the state of environment ``k`` on branch ``i``.
    """

    probs: np.ndarray
    env_states: Sequence[np.ndarray]
    defect: float = field(init=False)

    def __post_init__(self):
        probs = _as_weights(self.probs)
        envs = []
        for k, branch in enumerate(self.env_states):
            branch = np.array([la.as_density_matrix(r) for r in branch])
            if len(branch) != len(probs):
                raise ShapeError(f"environment {k} has {len(branch)} branches, expected {len(probs)}")
            envs.append(branch)
        if not envs:
            raise ShapeError("an SBS state needs at least one environment")
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "env_states", tuple(envs))
        object.__setattr__(self, "defect", self._defect())

    def _defect(self) -> float:
        worst = 0.0
        n = len(self.probs)
        for branch in self.env_states:
            for i in range(n):
                for j in range(i):
                    worst = max(worst, la.fidelity(branch[i], branch[j]))
        return worst

    @property
    def pointer_dim(self) -> int:
        return len(self.probs)

    @property
    def factor_dims(self) -> list[int]:
        return [self.pointer_dim] + [b.shape[1] for b in self.env_states]

    def is_exact(self, tol: float = 1e-9) -> bool:
        return self.defect <= tol

    def assemble(self, cap: int = la.DEFAULT_CAP) -> np.ndarray:
        la.check_cap(int(np.prod(self.factor_dims)), cap)
        out = 0
        for i, p in enumerate(self.probs):
            pointer = np.zeros((self.pointer_dim, self.pointer_dim))
            pointer[i, i] = 1.0
            out = out + p * la.kron_all([pointer] + [b[i] for b in self.env_states], cap)
        return out


def _apply_local_pvm(rho, dims, site, pvm: PVM):
    """Apply a PVM channel on one tensor factor of ``rho``."""
    out = np.zeros_like(rho)
    for proj in list(pvm.projectors) + [pvm.remainder]:
        op = la.embed(proj, site, dims)
        out += op @ rho @ op.conj().T
    return out


def support_pvm(states, tol: float = SUPPORT_TOL) -> PVM:
    """PVM of support projectors; requires mutually orthogonal supports."""
    return PVM(np.array([la.support_projector(s, tol) for s in states]))


def sbs_nondisturbance_check(s: SBSState, tol: float = 1e-9, cap: int = la.DEFAULT_CAP) -> float:
    """Trace distance between an exact SBS state and its image under local support measurements."""
    if not s.is_exact(tol):
        raise PreconditionError(f"branch states are not perfectly distinguishable (defect {s.defect:.3e})")
    rho = s.assemble(cap)
    dims = s.factor_dims
    measured = rho
    for k, branch in enumerate(s.env_states):
        measured = _apply_local_pvm(measured, dims, k + 1, support_pvm(branch))
    return la.trace_distance(rho, measured)


def sbs_local_reduction(s: SBSState, l: int) -> Ensemble:
    """The ensemble ``{(p_i, rho_i^{E^l})}`` seen by an observer of environment ``l``."""
    if not 0 <= l < len(s.env_states):
        raise IndexError(f"environment index {l} out of range")
    return Ensemble(s.probs, s.env_states[l])

