"""Gram-Schmidt PVMs and the discrimination bounds built from them.

Indices are 0-based throughout: ``overlaps[k, i] = <phi_k|psi_i>`` and the
Gram determinant ``D_j`` is over the first ``j`` vectors (``D_0 = 1``).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from typing import NamedTuple, Sequence

import numpy as np

from . import kernels
from . import linalg as la
from .errors import BoundViolationError, DegeneracyError, ShapeError, ValidationError
from .qsd import PVM, Ensemble, pvm_objective

DEPENDENCE_TOL = 1e-10
WEIGHT_TOL = 1e-10


def _as_vectors(vectors) -> np.ndarray:
    v = np.array([la.as_pure_state(x, 1e-10) for x in vectors])
    if v.ndim != 2:
        raise ShapeError("vectors must share one dimension")
    return v


def gram_matrix(vectors) -> np.ndarray:
    """``G[a, b] = <psi_a|psi_b>``."""
    v = np.asarray(vectors, dtype=complex)
    return v.conj() @ v.T


def first_dependent_index(vectors, tol: float = DEPENDENCE_TOL) -> int | None:
    """Index of the first vector making the leading Gram block singular, or None."""
    g = gram_matrix(vectors)
    for j in range(1, g.shape[0] + 1):
        if np.linalg.eigvalsh(g[:j, :j])[0] <= tol:
            return j - 1
    return None


@dataclass(frozen=True)
class GramBasis:
    """Result of orthonormalizing ``inputs`` in order.

    ``ortho[i]`` is ``phi_i`` (a zero row if input ``i`` was dropped as
    dependent), ``alpha[i]`` its normalizer, ``grams[j]`` the Gram determinant
    of the first ``j`` inputs and ``overlaps[k, i] = <phi_k|psi_i>``.
    """

    inputs: np.ndarray
    ortho: np.ndarray
    alpha: np.ndarray
    grams: np.ndarray
    overlaps: np.ndarray
    kept: np.ndarray

    def __len__(self):
        return len(self.inputs)

    @property
    def complete(self) -> bool:
        return bool(np.all(self.kept))

    def projectors(self) -> np.ndarray:
        return np.array([la.projector(p) for p in self.ortho])

    def pvm(self) -> PVM:
        return PVM(self.projectors())


def _leading_dets(vectors) -> np.ndarray:
    g = gram_matrix(vectors)
    return np.array([1.0] + [np.linalg.det(g[:j, :j]).real for j in range(1, g.shape[0] + 1)])


def gram_schmidt(vectors, tol: float = DEPENDENCE_TOL, allow_dependent: bool = False) -> GramBasis:
    """Orthonormalize unit vectors in the given order.

    Uses modified Gram-Schmidt with a reorthogonalization pass. By default a
    smallest Gram eigenvalue ``<= tol`` raises :class:`DegeneracyError`
    naming the first offending index. With ``allow_dependent=True`` such
    vectors are instead dropped (zero projector) whenever their squared
    residual falls to ``tol``.
    """
    v = _as_vectors(vectors)
    if not allow_dependent:
        bad = first_dependent_index(v, tol)
        if bad is not None:
            raise DegeneracyError(bad)
    phi, alpha, kept = kernels.mgs(v, tol if allow_dependent else -1.0)
    return GramBasis(
        inputs=v,
        ortho=phi,
        alpha=alpha,
        grams=_leading_dets(v),
        overlaps=phi.conj() @ v.T,
        kept=kept,
    )


def gram_determinant(vectors, j: int) -> float:
    """Determinant of the Gram matrix of the first ``j`` vectors (``D_0 = 1``)."""
    if j == 0:
        return 1.0
    g = gram_matrix(vectors)
    if not 1 <= j <= g.shape[0]:
        raise IndexError(f"j={j} out of range")
    det = np.linalg.det(g[:j, :j])
    if abs(det.imag) > 1e-10 * max(1.0, abs(det.real)):
        raise ValidationError("Gram determinant has a non-negligible imaginary part")
    return float(det.real)


def overlap_via_determinant(vectors, i: int, k: int) -> complex:
    """``<psi_i|phi_k>`` from pairwise inner products only (bordered Gram determinant).

    Requires ``k < i``. The bordered matrix is the leading ``(k+1) x (k+1)``
    Gram block with its last row replaced by ``<psi_i|psi_b>``; dividing by
    ``sqrt(D_k D_{k+1})`` gives the overlap.
    """
    if not 0 <= k < i:
        raise IndexError(f"need 0 <= k < i, got k={k}, i={i}")
    g = gram_matrix(vectors)
    m = g[: k + 1, : k + 1].copy()
    m[k, :] = g[i, : k + 1]
    d_prev = 1.0 if k == 0 else np.linalg.det(g[:k, :k]).real
    d_cur = np.linalg.det(g[: k + 1, : k + 1]).real
    return complex(np.linalg.det(m) / np.sqrt(d_prev * d_cur))


def lemma2_exact(basis: GramBasis, i: int) -> float:
    """``||rho_i - P_i rho_i P_i||_1`` with ``rho_i = |psi_i><psi_i|``, ``P_i = |phi_i><phi_i|``."""
    rho = la.projector(basis.inputs[i])
    proj = la.projector(basis.ortho[i])
    return la.trace_norm(rho - proj @ rho @ proj)


def lemma2_bound(basis: GramBasis, i: int, verify: bool = True, tol: float = 1e-9) -> float:
    """``2 sum_{k<i} |<phi_k|psi_i>|``; optionally checks the exact value against it."""
    bound = 2.0 * float(np.sum(np.abs(basis.overlaps[:i, i])))
    if verify:
        exact = lemma2_exact(basis, i)
        if exact > bound + tol:
            raise BoundViolationError(f"overlap bound violated at i={i}: {exact} > {bound}")
    return bound


def determinant_overlaps(vectors) -> np.ndarray:
    """Matrix ``R[k, i] = <phi_k|psi_i>`` for ``k < i`` computed by determinants; diagonal is ``alpha``."""
    v = np.asarray(vectors)
    n = len(v)
    dets = _leading_dets(v)
    r = np.zeros((n, n), dtype=complex)
    for i in range(n):
        r[i, i] = np.sqrt(dets[i + 1] / dets[i])
        for k in range(i):
            r[k, i] = np.conj(overlap_via_determinant(v, i, k))
    return r


class DiscriminationBound(NamedTuple):
    bound: float
    pvm: PVM
    achieved: float


def theorem3_bound(e: Ensemble | tuple, method: str = "iterative") -> DiscriminationBound:
    """Gram-PVM bound for an ensemble of linearly independent pure states.

    ``e`` is an :class:`Ensemble` of rank-one states or a ``(weights,
    vectors)`` pair. The bound is ``sum_i p_i 2 sum_{k<i} |<phi_k|psi_i>|``
    (the ``i = 0`` term vanishes since ``phi_0 = psi_0``). ``method`` selects
    the overlap route: ``"iterative"`` (Gram-Schmidt) or ``"determinant"``.
    The returned ``achieved`` is the exact objective of the returned PVM.
    """
    weights, vectors = _pure_ensemble(e)
    basis = gram_schmidt(vectors)
    if method == "iterative":
        ov = basis.overlaps
    elif method == "determinant":
        ov = determinant_overlaps(vectors)
    else:
        raise ValueError(f"unknown method {method!r}")
    bound = 2.0 * sum(weights[i] * np.sum(np.abs(ov[:i, i])) for i in range(len(weights)))
    states = np.array([la.projector(v) for v in vectors])
    achieved = pvm_objective(weights, states, basis.projectors())
    return DiscriminationBound(float(bound), basis.pvm(), achieved)


def _determinant_sum(weights, vectors) -> float:
    """``sum_i p_i sum_{k<i} |M_{k,i} / (D_k D_{k+1})|`` with bordered determinants ``M``."""
    g = gram_matrix(vectors)
    dets = _leading_dets(vectors)
    total = 0.0
    for i in range(1, len(weights)):
        for k in range(i):
            m = g[: k + 1, : k + 1].copy()
            m[k, :] = g[i, : k + 1]
            total += weights[i] * abs(np.linalg.det(m) / (dets[k] * dets[k + 1]))
    return float(total)


def theorem3_determinant_form(e: Ensemble | tuple) -> float:
    """Determinant expression with ``D_{k-1} D_k`` (no square root) in the denominator.

    Not a bound in general; kept for side-by-side comparison with :func:`theorem3_bound`.
    """
    weights, vectors = _pure_ensemble(e)
    return 2.0 * _determinant_sum(weights, vectors)


def _pure_ensemble(e):
    if isinstance(e, Ensemble):
        vectors = []
        for rho in e.states:
            w, v = np.linalg.eigh(rho)
            if w[-1] < 1 - 1e-9:
                raise ValidationError("ensemble state is not pure")
            vectors.append(v[:, -1])
        return e.weights, np.array(vectors)
    weights, vectors = e
    weights = np.asarray(weights, dtype=float)
    if abs(weights.sum() - 1.0) > WEIGHT_TOL:
        raise ValidationError("weights must sum to 1")
    return weights, _as_vectors(vectors)


def order_sensitivity(weights, vectors) -> dict[tuple[int, ...], float]:
    """Pure-state Gram bound for every processing order of the inputs (small N only)."""
    weights = np.asarray(weights, dtype=float)
    vectors = _as_vectors(vectors)
    out = {}
    for perm in permutations(range(len(weights))):
        p = list(perm)
        out[perm] = theorem3_bound((weights[p], vectors[p])).bound
    return out


# -- Finite mixtures of pure states -------------------------------------------


@dataclass(frozen=True)
class MixedIndex:
    """Flattened sequence of mixture components.

    Components are ordered branch by branch: all of branch 0, then branch 1,
    and so on. ``pairs[s] = (i, k)`` inverts ``index_of``; ``branch[s]`` is
    the branch label of component ``s``.
    """

    xi: np.ndarray
    omega: np.ndarray
    pairs: tuple[tuple[int, int], ...]
    branch: np.ndarray
    branch_weights: np.ndarray

    def index_of(self, i: int, k: int) -> int:
        return self.pairs.index((i, k))

    @property
    def n_branches(self) -> int:
        return len(self.branch_weights)

    def branch_states(self) -> np.ndarray:
        """Density matrix of every branch, ``sum_k eta_ik |xi><xi|``."""
        d = self.xi.shape[1]
        out = np.zeros((self.n_branches, d, d), dtype=complex)
        for s, (i, _) in enumerate(self.pairs):
            if self.branch_weights[i] > 0:
                out[i] += self.omega[s] / self.branch_weights[i] * la.projector(self.xi[s])
        return out


def flatten_mixed(mixtures: Sequence[tuple[float, Sequence[tuple[float, Sequence[complex]]]]]) -> MixedIndex:
    """Flatten ``[(p_i, [(eta_ik, psi_ik), ...]), ...]`` into one sequence.

    Branches with ``p_i = 0`` still contribute their components, with zero weight.
    """
    p = np.array([m[0] for m in mixtures], dtype=float)
    if abs(p.sum() - 1.0) > WEIGHT_TOL or np.any(p < -WEIGHT_TOL):
        raise ValidationError(f"branch weights sum to {p.sum()!r}, expected 1")
    xi, omega, pairs, branch = [], [], [], []
    for i, (pi, comps) in enumerate(mixtures):
        eta = np.array([c[0] for c in comps], dtype=float)
        if not len(comps) or abs(eta.sum() - 1.0) > WEIGHT_TOL or np.any(eta < -WEIGHT_TOL):
            raise ValidationError(f"component weights of branch {i} sum to {eta.sum()!r}, expected 1")
        for k, (eta_ik, vec) in enumerate(comps):
            xi.append(la.as_pure_state(vec, 1e-10))
            omega.append(pi * eta_ik)
            pairs.append((i, k))
            branch.append(i)
    return MixedIndex(np.array(xi), np.array(omega), tuple(pairs), np.array(branch), p)


class MixedBound(NamedTuple):
    bound: float
    pvm: PVM
    achieved: float
    first_term: float
    cross_term: float
    coarse: float


def theorem5_bound(mi: MixedIndex, allow_dependent: bool = False) -> MixedBound:
    """Block Gram-PVM bound for finite mixtures of pure states.

    ``bound = first_term + cross_term`` with

    * ``first_term = 2 sum_s omega_s sum_{k<s} |<phi_k|xi_s>|``
    * ``cross_term = sum_s omega_s sum_{l != s} sum_{k != s} |<phi_l|xi_s><xi_s|phi_k>|``,
      ``l`` and ``k`` running over components of the same branch as ``s``.

    The PVM is ``P_i = sum_{s in branch i} |phi_s><phi_s|``. ``coarse`` is the
    looser ``3 sum_s omega_s sum_{l != s, same branch} |<phi_l|xi_s>|``; it is
    returned for reference only and is not a valid bound in general.
    """
    basis = gram_schmidt(mi.xi, allow_dependent=allow_dependent)
    return _theorem5_from_basis(mi, basis)


def _theorem5_from_basis(mi: MixedIndex, basis: GramBasis) -> MixedBound:
    r = basis.overlaps
    s_count = len(mi.omega)
    first = 0.0
    cross = 0.0
    coarse = 0.0
    for s in range(s_count):
        first += 2.0 * mi.omega[s] * np.sum(np.abs(r[:s, s]))
        same = (mi.branch == mi.branch[s]) & (np.arange(s_count) != s)
        inner = np.sum(np.abs(r[same, s]))
        cross += mi.omega[s] * inner * inner
        coarse += 3.0 * mi.omega[s] * inner
    projs = basis.projectors()
    blocks = np.array([projs[mi.branch == i].sum(axis=0) for i in range(mi.n_branches)])
    achieved = pvm_objective(mi.branch_weights, mi.branch_states(), blocks)
    return MixedBound(float(first + cross), PVM(blocks), achieved, float(first), float(cross), float(coarse))
