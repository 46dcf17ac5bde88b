"""Trace-distance bounds between the evolving state and its SBS approximant."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import linalg as la
from .dynamics import (
    SBSApproximant,
    VonNeumannModel,
    conditional_env_state,
    gamma_total,
    reduced_state,
    sbs_approximant,
)
from .errors import BoundViolationError, DegeneracyError, DimensionLimitError, ShapeError, ValidationError
from .gram import _determinant_sum, _theorem5_from_basis
from .qsd import pvm_objective

CHAIN_TOL = 1e-8
LEMMA_TOL = 1e-9


def telescopic_rhs(as_: Sequence, bs: Sequence) -> float:
    """``sum_j (prod_{k<j} ||A_k||_1) ||A_j - B_j||_1 (prod_{k>j} ||B_k||_1)``."""
    if len(as_) != len(bs) or not as_:
        raise ShapeError("need two non-empty factor lists of equal length")
    for a, b in zip(as_, bs):
        if np.shape(a) != np.shape(b):
            raise ShapeError(f"factor shapes differ: {np.shape(a)} vs {np.shape(b)}")
    na = [la.trace_norm(a) for a in as_]
    nb = [la.trace_norm(b) for b in bs]
    return float(
        sum(
            np.prod(na[:j]) * la.trace_norm(np.asarray(as_[j]) - np.asarray(bs[j])) * np.prod(nb[j + 1 :])
            for j in range(len(as_))
        )
    )


def telescopic_bound(
    as_: Sequence, bs: Sequence, verify: bool = True, cap: int = la.DEFAULT_CAP, tol: float = LEMMA_TOL
) -> float:
    """Upper bound on ``||A_1 (x) ... (x) A_n - B_1 (x) ... (x) B_n||_1``.

    With ``verify`` the left-hand side is assembled (if it fits in ``cap``)
    and checked against the bound; a violation raises
    :class:`BoundViolationError`.
    """
    rhs = telescopic_rhs(as_, bs)
    if verify:
        dim = int(np.prod([np.shape(a)[0] for a in as_]))
        if dim <= cap:
            lhs = la.trace_norm(la.kron_all(as_, cap) - la.kron_all(bs, cap))
            if lhs > rhs + tol:
                raise BoundViolationError(f"telescopic inequality violated: {lhs} > {rhs}")
    return rhs


def rescale_lemma(L: float) -> float:
    """If ``||rho - eta sigma||_1 <= L`` for states and ``eta`` in [0, 1], then ``||rho - sigma||_1 <= 2L``."""
    if L < 0:
        raise ValueError("L must be non-negative")
    return 2.0 * L


class RescaleCheck(NamedTuple):
    premise: float
    distance: float
    bound: float

    @property
    def holds(self) -> bool:
        return self.distance <= self.bound + LEMMA_TOL


def check_rescale(rho, sigma, eta: float) -> RescaleCheck:
    """Evaluate the rescaling implication on concrete states, with ``L`` taken as tight."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta={eta} outside [0, 1]")
    rho = la.as_density_matrix(rho)
    sigma = la.as_density_matrix(sigma)
    L = la.trace_norm(rho - eta * sigma)
    return RescaleCheck(L, la.trace_norm(rho - sigma), rescale_lemma(L))


@dataclass(frozen=True)
class BoundReport:
    """Bound terms and measured distances at one time point.

    ``measured_*`` are ``None`` when the observed space exceeds the dimension
    cap. ``determinant_form`` is the Gram-determinant expression (pure
    environments only), kept for comparison; it is not used as a bound.
    """

    t: float
    gamma_term: float
    gram_term: float
    total_bound: float
    measured_unnormalized: float | None
    measured_sbs: float | None
    conjectured: float
    normalizer: float
    determinant_form: float | None
    flags: tuple[str, ...]

    @property
    def slack_unnormalized(self) -> float | None:
        if self.measured_unnormalized is None:
            return None
        return self.gram_term + self.gamma_term - self.measured_unnormalized

    @property
    def slack_sbs(self) -> float | None:
        if self.measured_sbs is None:
            return None
        return self.total_bound - 0.5 * self.measured_sbs

    @property
    def min_slack(self) -> float | None:
        vals = [s for s in (self.slack_unnormalized, self.slack_sbs) if s is not None]
        return min(vals) if vals else None

    def is_sound(self, tol: float = CHAIN_TOL) -> bool:
        s = self.min_slack
        return s is None or s >= -tol

    @property
    def conjecture_holds(self) -> bool | None:
        if self.measured_sbs is None:
            return None
        return 0.5 * self.measured_sbs <= self.conjectured + CHAIN_TOL


def conjectured_bound(m: VonNeumannModel, t: float) -> float:
    """Right-hand side of the conjectured fidelity bound. Diagnostic only; never a guarantee."""
    sigma = m.sigma
    total = gamma_total(m, t)
    for k in range(m.n_observed):
        states = [conditional_env_state(m, k, xi, xi, t) for xi in m.x]
        for i in range(m.d_s):
            for j in range(m.d_s):
                if i != j and sigma[i] > 0 and sigma[j] > 0:
                    total += np.sqrt(sigma[i] * sigma[j]) * la.fidelity(states[i], states[j])
    return float(total)


def environment_terms(m: VonNeumannModel, approx: SBSApproximant) -> list[float]:
    """Per observed environment, a bound on ``sum_i sigma_i ||rho_i - P_i rho_i P_i||_1``.

    Gram PVMs use the overlap bound (block bound for mixtures); any other PVM
    contributes the exact objective.
    """
    sigma = m.sigma
    out = []
    for k, ep in enumerate(approx.env_pvms):
        if ep.basis is None:
            states = [conditional_env_state(m, k, xi, xi, approx.t) for xi in m.x]
            out.append(pvm_objective(sigma, states, ep.pvm.projectors))
        elif ep.mixed_index is None:
            r = ep.basis.overlaps
            out.append(float(2.0 * sum(sigma[i] * np.sum(np.abs(r[:i, i])) for i in range(m.d_s))))
        else:
            out.append(_theorem5_from_basis(ep.mixed_index, ep.basis).bound)
    return out


def _approximant(m, t, strategy, strict, flags):
    if strategy == "support":
        return sbs_approximant(m, t, "support")
    if strategy != "gram":
        raise ValueError(f"unknown strategy {strategy!r}")
    try:
        return sbs_approximant(m, t, "gram")
    except DegeneracyError:
        if strict:
            raise
    try:
        approx = sbs_approximant(m, t, "support")
        flags.append("degenerate_support_fallback")
        return approx
    except ValidationError:
        pass
    approx = sbs_approximant(m, t, "gram", allow_dependent=True)
    for k, ep in enumerate(approx.env_pvms):
        if ep.degenerate:
            flags.append(f"degenerate_env{k}@{ep.dependent_index}")
    return approx


def _measured_terms(m, t, approx, cap):
    rho_t = reduced_state(m, t).assemble(cap)
    un = la.trace_norm(rho_t - approx.unnormalized(cap))
    sbs = la.trace_norm(rho_t - approx.normalized(cap)) if approx.normalizer > 0 else None
    return un, sbs


def distance_to_sbs(m: VonNeumannModel, t: float, approx: SBSApproximant, cap: int = la.DEFAULT_CAP):
    """``(||rho_t - rho_UN||_1, ||rho_t - rho_SBS||_1)`` at the approximant's PVMs."""
    return _measured_terms(m, t, approx, cap)


def theorem4_bound(
    m: VonNeumannModel,
    t: float,
    *,
    strategy: str = "gram",
    strict: bool = False,
    measure: bool = True,
    verify: bool = True,
    cap: int = la.DEFAULT_CAP,
    tol: float = CHAIN_TOL,
) -> BoundReport:
    """Gram-PVM bound on half the trace distance to the SBS approximant.

    ``total_bound = gram_term + gamma_term`` where ``gram_term`` sums, over
    observed environments, ``sigma_i * 2 sum_{s<i} |<phi_s|psi_i>|`` (pure
    environments) or the block bound for mixtures. With ``strategy="support"``
    the exact objective of the support PVMs is used instead.

    Dependent evolved branch vectors are flagged. The support PVMs are used
    if the branch states are orthogonal; otherwise the dependent vectors are
    dropped from the Gram PVM, which keeps the bound valid. Pass
    ``strict=True`` to raise :class:`DegeneracyError` instead.

    With ``measure`` the exact distances are computed when the observed space
    fits in ``cap``; with ``verify`` a violated inequality raises
    :class:`BoundViolationError`.
    """
    flags = []
    if m.degenerate_pairs:
        flags.append("degenerate_x")
    approx = _approximant(m, t, strategy, strict, flags)
    gamma_term = gamma_total(m, t)
    gram_term = float(sum(environment_terms(m, approx)))
    total = gram_term + gamma_term
    if total >= 1.0:
        flags.append("vacuous_bound")

    det_form = None
    if all(ep.basis is not None and ep.mixed_index is None and ep.basis.complete for ep in approx.env_pvms):
        det_form = float(sum(0.5 * _determinant_sum(m.sigma, ep.basis.inputs) for ep in approx.env_pvms))

    un = sbs = None
    if measure:
        try:
            un, sbs = _measured_terms(m, t, approx, cap)
        except DimensionLimitError:
            flags.append("not_measured_cap")
    if approx.normalizer <= 0:
        flags.append("zero_normalizer")

    report = BoundReport(
        t=float(t),
        gamma_term=gamma_term,
        gram_term=gram_term,
        total_bound=total,
        measured_unnormalized=un,
        measured_sbs=sbs,
        conjectured=conjectured_bound(m, t),
        normalizer=approx.normalizer,
        determinant_form=det_form,
        flags=tuple(flags),
    )
    if report.conjecture_holds is False:
        report = _with_flag(report, "conjecture_violated")
    if verify and not report.is_sound(tol):
        raise BoundViolationError(f"bound chain violated at t={t}: slack {report.min_slack}")
    return report


def _with_flag(report: BoundReport, flag: str) -> BoundReport:
    from dataclasses import replace

    return replace(report, flags=report.flags + (flag,))
