"""Von Neumann measurement dynamics ``H = X (x) sum_k g_k B_k``.

The system observable ``X`` is diagonal in the pointer basis with eigenvalues
``x``. Nothing here builds the full Hilbert space except
:meth:`ReducedState.assemble`, :func:`channel_decomposition_check` and the
approximant assembly helpers, which all honour a dimension cap.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from . import linalg as la
from .errors import DegeneracyError, ShapeError, ValidationError
from .gram import GramBasis, MixedIndex, flatten_mixed, gram_schmidt
from .qsd import PVM, SBSState, support_pvm

COMPONENT_TOL = 1e-10


class DegenerateSpectrumWarning(UserWarning):
    """Two pointer states share an eigenvalue of X; they can never decohere."""


@dataclass(frozen=True)
class Environment:
    """One environment: generator ``B``, coupling ``g`` and initial state.

    ``components`` optionally fixes the pure-state decomposition
    ``(weights, vectors)`` of the initial state used by the mixed-state bound;
    otherwise the eigendecomposition is used.
    """

    generator: np.ndarray
    coupling: float
    initial: np.ndarray
    components: tuple[np.ndarray, np.ndarray] | None = None

    def __post_init__(self):
        b = la.as_hermitian(self.generator)
        rho = la.as_density_matrix(self.initial)
        if b.shape != rho.shape:
            raise ShapeError(f"generator {b.shape} and initial state {rho.shape} differ")
        object.__setattr__(self, "generator", b)
        object.__setattr__(self, "initial", rho)
        object.__setattr__(self, "coupling", float(self.coupling))
        if self.components is None:
            w, v = np.linalg.eigh(rho)
            sel = w > COMPONENT_TOL
            comps = (w[sel] / w[sel].sum(), v[:, sel].T.copy())
        else:
            weights = np.asarray(self.components[0], dtype=float)
            vecs = np.array([la.as_pure_state(x, 1e-10) for x in self.components[1]])
            if abs(weights.sum() - 1.0) > 1e-10 or np.any(weights < 0):
                raise ValidationError("component weights must be a probability vector")
            mix = np.einsum("m,ma,mb->ab", weights, vecs, vecs.conj())
            if np.max(np.abs(mix - rho)) > 1e-9:
                raise ValidationError("components do not reproduce the initial state")
            comps = (weights, vecs)
        object.__setattr__(self, "components", comps)

    @classmethod
    def pure(cls, generator, coupling, vector):
        v = la.as_pure_state(vector, 1e-10)
        return cls(generator, coupling, la.projector(v), (np.ones(1), v[None, :]))

    @classmethod
    def mixture(cls, generator, coupling, weights, vectors):
        weights = np.asarray(weights, dtype=float)
        vecs = np.array([la.as_pure_state(x, 1e-10) for x in vectors])
        rho = np.einsum("m,ma,mb->ab", weights, vecs, vecs.conj())
        return cls(generator, coupling, rho, (weights, vecs))

    @property
    def dim(self) -> int:
        return self.generator.shape[0]

    @property
    def is_pure(self) -> bool:
        return len(self.components[0]) == 1

    @cached_property
    def _eig(self):
        return np.linalg.eigh(self.generator)

    def unitary(self, x: float, t: float) -> np.ndarray:
        """``exp(-i t x g B)``."""
        w, v = self._eig
        return (v * np.exp(-1j * t * x * self.coupling * w)) @ v.conj().T

    def trace_phase(self, dx: float, t: float) -> complex:
        """``Tr(rho exp(-i t dx g B))``."""
        w, v = self._eig
        diag = np.einsum("ai,ab,bi->i", v.conj(), self.initial, v).real
        return complex(np.sum(diag * np.exp(-1j * t * dx * self.coupling * w)))


@dataclass(frozen=True)
class VonNeumannModel:
    """System observable eigenvalues, initial system state and environments.

    The first ``n_observed`` environments are kept; the rest are traced out.
    ``rho_s`` is written in the eigenbasis of ``X``.
    """

    x: np.ndarray
    rho_s: np.ndarray
    environments: tuple[Environment, ...]
    n_observed: int

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        rho = la.as_density_matrix(self.rho_s)
        if x.ndim != 1 or rho.shape[0] != len(x):
            raise ShapeError(f"rho_S has shape {rho.shape} but X has {len(x)} eigenvalues")
        envs = tuple(self.environments)
        if not envs:
            raise ValidationError("need at least one environment")
        if not 1 <= self.n_observed <= len(envs):
            raise ValidationError(f"n_observed={self.n_observed} not in [1, {len(envs)}]")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "rho_s", rho)
        object.__setattr__(self, "environments", envs)
        if self.degenerate_pairs:
            warnings.warn(
                f"X has repeated eigenvalues at pointer pairs {self.degenerate_pairs}; "
                "those branches stay indistinguishable",
                DegenerateSpectrumWarning,
                stacklevel=3,
            )

    @property
    def d_s(self) -> int:
        return len(self.x)

    @property
    def sigma(self) -> np.ndarray:
        return np.diag(self.rho_s).real.copy()

    @property
    def observed(self) -> tuple[Environment, ...]:
        return self.environments[: self.n_observed]

    @property
    def traced(self) -> tuple[Environment, ...]:
        return self.environments[self.n_observed :]

    @property
    def degenerate_pairs(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(self.d_s) for j in range(i + 1, self.d_s) if self.x[i] == self.x[j]]

    @property
    def observed_dims(self) -> list[int]:
        return [self.d_s] + [e.dim for e in self.observed]

    @property
    def full_dims(self) -> list[int]:
        return [self.d_s] + [e.dim for e in self.environments]


def conditional_env_state(m: VonNeumannModel, k: int, x: float, y: float, t: float) -> np.ndarray:
    """``exp(-itx g_k B_k) rho^k exp(ity g_k B_k)``."""
    env = m.environments[k]
    return env.unitary(x, t) @ env.initial @ env.unitary(y, t).conj().T


def gamma(m: VonNeumannModel, k: int, i: int, j: int, t: float) -> complex:
    """Trace of the cross-branch conditional operator of environment ``k``."""
    if i == j:
        return 1.0 + 0j
    return m.environments[k].trace_phase(m.x[i] - m.x[j], t)


def decoherence_factor(m: VonNeumannModel, i: int, j: int, t: float) -> complex:
    """Product of ``gamma`` over the traced environments (1 if none are traced)."""
    out = 1.0 + 0j
    for k in range(m.n_observed, len(m.environments)):
        out *= gamma(m, k, i, j, t)
    return out


def decoherence_matrix(m: VonNeumannModel, t: float) -> np.ndarray:
    d = m.d_s
    g = np.ones((d, d), dtype=complex)
    for i in range(d):
        for j in range(i + 1, d):
            g[i, j] = decoherence_factor(m, i, j, t)
            g[j, i] = np.conj(g[i, j])
    return g


def gamma_total(m: VonNeumannModel, t: float) -> float:
    """``sum_{i != j} |sigma_ij| prod_{traced k} |gamma_ij^k(t)|``."""
    g = np.abs(decoherence_matrix(m, t))
    np.fill_diagonal(g, 0.0)
    return float(np.sum(np.abs(m.rho_s) * g))


@dataclass(frozen=True)
class ReducedState:
    """State of the system plus observed environments at time ``t``.

    ``coefficients[i, j] = sigma_ij Gamma(i, j, t)`` and
    ``conditionals[k][i, j]`` is the conditional operator of observed
    environment ``k`` for the branch pair ``(i, j)``.
    """

    t: float
    coefficients: np.ndarray
    conditionals: tuple[np.ndarray, ...]

    @property
    def factor_dims(self) -> list[int]:
        return [self.coefficients.shape[0]] + [c.shape[2] for c in self.conditionals]

    def assemble(self, cap: int = la.DEFAULT_CAP) -> np.ndarray:
        d = self.coefficients.shape[0]
        la.check_cap(int(np.prod(self.factor_dims)), cap)
        out = 0
        for i in range(d):
            for j in range(d):
                c = self.coefficients[i, j]
                if c == 0:
                    continue
                unit = np.zeros((d, d))
                unit[i, j] = 1.0
                out = out + c * la.kron_all([unit] + [cond[i, j] for cond in self.conditionals], cap)
        return out


def _conditionals(m: VonNeumannModel, t: float, diagonal_only: bool = False):
    out = []
    for env in m.observed:
        us = [env.unitary(xi, t) for xi in m.x]
        c = np.zeros((m.d_s, m.d_s, env.dim, env.dim), dtype=complex)
        for i in range(m.d_s):
            for j in range(m.d_s):
                if diagonal_only and i != j:
                    continue
                c[i, j] = us[i] @ env.initial @ us[j].conj().T
        out.append(c)
    return tuple(out)


def reduced_state(m: VonNeumannModel, t: float) -> ReducedState:
    """Evolve and trace out the unobserved environments, in factored form."""
    return ReducedState(float(t), m.rho_s * decoherence_matrix(m, t), _conditionals(m, t))


def diag_state(m: VonNeumannModel, t: float) -> ReducedState:
    """The reduced state restricted to its pointer-diagonal terms."""
    return ReducedState(float(t), np.diag(m.sigma).astype(complex), _conditionals(m, t, diagonal_only=True))


def observed_unitary(m: VonNeumannModel, t: float, cap: int = la.DEFAULT_CAP) -> np.ndarray:
    """``exp(-it X (x) sum_{observed k} g_k B_k)`` on the system plus observed environments."""
    dims = m.observed_dims
    la.check_cap(int(np.prod(dims)), cap)
    h_env = sum(
        env.coupling * la.embed(env.generator, k, dims[1:], cap) for k, env in enumerate(m.observed)
    )
    return la.unitary_exp(np.kron(np.diag(m.x), h_env), t)


def channel_decomposition_check(m: VonNeumannModel, t: float, cap: int = la.DEFAULT_CAP) -> float:
    """Trace distance between the reduced state and the unitary-after-dephasing route."""
    dephased = m.rho_s * decoherence_matrix(m, t)
    initial = la.kron_all([dephased] + [env.initial for env in m.observed], cap)
    u = observed_unitary(m, t, cap)
    return la.trace_distance(reduced_state(m, t).assemble(cap), u @ initial @ u.conj().T)


# -- SBS approximant -----------------------------------------------------------


def branch_vectors(m: VonNeumannModel, k: int, t: float) -> np.ndarray:
    """Evolved branch vectors ``exp(-i t x_i g_k B_k)|psi^k>`` of a pure environment."""
    env = m.environments[k]
    if not env.is_pure:
        raise ValidationError(f"environment {k} is not pure")
    psi = env.components[1][0]
    return np.array([env.unitary(xi, t) @ psi for xi in m.x])


def branch_mixture_index(m: VonNeumannModel, k: int, t: float) -> MixedIndex:
    """Flattened evolved components of environment ``k``, branch weights ``sigma_i``."""
    env = m.environments[k]
    weights, vecs = env.components
    sigma = m.sigma
    sigma = sigma / sigma.sum()
    mixtures = []
    for xi, s in zip(m.x, sigma):
        u = env.unitary(xi, t)
        mixtures.append((s, [(w, u @ v) for w, v in zip(weights, vecs)]))
    return flatten_mixed(mixtures)


@dataclass(frozen=True)
class EnvironmentPVM:
    """PVM chosen for one observed environment, with the data it came from."""

    pvm: PVM
    basis: GramBasis | None = None
    mixed_index: MixedIndex | None = None
    degenerate: bool = False
    dependent_index: int | None = None


@dataclass(frozen=True)
class SBSApproximant:
    """Projected diagonal state ``sum_i sigma_i |i><i| (x)_k P_i rho_i^k P_i`` and its norm.

    ``projected[k][i]`` is the unnormalized ``P_i rho_i^k P_i``.
    ``normalizer`` is the trace of the unnormalized operator.
    """

    t: float
    sigma: np.ndarray
    projected: tuple[np.ndarray, ...]
    env_pvms: tuple[EnvironmentPVM, ...]
    strategy: str
    normalizer: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "normalizer", float(np.sum(self.branch_weights)))

    @property
    def branch_weights(self) -> np.ndarray:
        """``sigma_i prod_k Tr(P_i rho_i^k P_i)``, before normalization."""
        w = self.sigma.copy()
        for proj in self.projected:
            w = w * np.einsum("iaa->i", proj).real
        return w

    @property
    def pointer_probs(self) -> np.ndarray:
        return self.branch_weights / self.normalizer

    @property
    def degenerate(self) -> bool:
        return any(e.degenerate for e in self.env_pvms)

    def _assemble(self, cap):
        d = len(self.sigma)
        la.check_cap(d * int(np.prod([p.shape[1] for p in self.projected])), cap)
        out = 0
        for i in range(d):
            if self.sigma[i] == 0:
                continue
            pointer = np.zeros((d, d))
            pointer[i, i] = 1.0
            out = out + self.sigma[i] * la.kron_all([pointer] + [p[i] for p in self.projected], cap)
        return out

    def unnormalized(self, cap: int = la.DEFAULT_CAP) -> np.ndarray:
        return self._assemble(cap)

    def normalized(self, cap: int = la.DEFAULT_CAP) -> np.ndarray:
        return self._assemble(cap) / self.normalizer

    def sbs_state(self) -> SBSState:
        """The normalized approximant as an :class:`SBSState`.

        Branches whose weight vanishes are left out (the pointer space then
        shrinks to the surviving branches).
        """
        live = self.branch_weights > 0
        envs = []
        for proj in self.projected:
            envs.append(np.array([proj[i] / np.trace(proj[i]).real for i in np.flatnonzero(live)]))
        return SBSState(self.pointer_probs[live] / self.pointer_probs[live].sum(), envs)


def _gram_env_pvm(m, k, t, allow_dependent):
    env = m.environments[k]
    if env.is_pure:
        vecs = branch_vectors(m, k, t)
        try:
            basis = gram_schmidt(vecs)
            return EnvironmentPVM(basis.pvm(), basis=basis)
        except DegeneracyError as exc:
            if not allow_dependent:
                raise DegeneracyError(exc.index, environment=k, time=t) from None
            basis = gram_schmidt(vecs, allow_dependent=True)
            return EnvironmentPVM(basis.pvm(), basis=basis, degenerate=True, dependent_index=exc.index)
    mi = branch_mixture_index(m, k, t)
    try:
        basis = gram_schmidt(mi.xi)
        degenerate, bad = False, None
    except DegeneracyError as exc:
        if not allow_dependent:
            raise DegeneracyError(exc.index, environment=k, time=t) from None
        basis = gram_schmidt(mi.xi, allow_dependent=True)
        degenerate, bad = True, exc.index
    projs = basis.projectors()
    blocks = np.array([projs[mi.branch == i].sum(axis=0) for i in range(m.d_s)])
    return EnvironmentPVM(PVM(blocks), basis=basis, mixed_index=mi, degenerate=degenerate, dependent_index=bad)


def sbs_approximant(
    m: VonNeumannModel,
    t: float,
    strategy: str | Sequence = "gram",
    allow_dependent: bool = False,
) -> SBSApproximant:
    """Project the diagonal state onto branch-orthogonal environment subspaces.

    Parameters
    ----------
    strategy : {"gram", "support"} or sequence
        ``"gram"`` orthonormalizes the evolved branch vectors (block-wise for
        mixed environments); ``"support"`` uses the supports of the evolved
        branch states, which must already be orthogonal. A sequence supplies
        one :class:`PVM` (or array of ``d_S`` projectors) per observed
        environment.
    allow_dependent : bool
        For ``"gram"``: instead of raising on dependent branch vectors, drop
        them (zero projector) and mark the environment as degenerate.
    """
    sigma = m.sigma
    env_pvms = []
    if isinstance(strategy, str):
        name = strategy
        for k, env in enumerate(m.observed):
            if strategy == "gram":
                env_pvms.append(_gram_env_pvm(m, k, t, allow_dependent))
            elif strategy == "support":
                states = [conditional_env_state(m, k, xi, xi, t) for xi in m.x]
                env_pvms.append(EnvironmentPVM(support_pvm(states)))
            else:
                raise ValueError(f"unknown strategy {strategy!r}")
    else:
        name = "custom"
        if len(strategy) != m.n_observed:
            raise ShapeError(f"need one PVM per observed environment ({m.n_observed})")
        for p in strategy:
            pvm = p if isinstance(p, PVM) else PVM(np.asarray(p))
            if len(pvm.projectors) != m.d_s:
                raise ShapeError(f"each PVM needs {m.d_s} projectors")
            env_pvms.append(EnvironmentPVM(pvm))
    projected = []
    for k, ep in enumerate(env_pvms):
        out = np.array(
            [p @ conditional_env_state(m, k, xi, xi, t) @ p for p, xi in zip(ep.pvm.projectors, m.x)]
        )
        projected.append(out)
    return SBSApproximant(float(t), sigma, tuple(projected), tuple(env_pvms), name)
