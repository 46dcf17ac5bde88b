"""Dense complex linear algebra on numpy arrays.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``. The
``as_*`` helpers validate and coerce; every other function assumes (and where
cheap, checks) well-formed input.
"""

from __future__ import annotations

import string
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionLimitError, ShapeError, ValidationError

DEFAULT_CAP = 4096
HERM_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-10
NORM_TOL = 1e-12


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValidationError("matrix has non-finite entries")
    return m


def as_square(a) -> np.ndarray:
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {m.shape}")
    return m


def is_hermitian(a, tol: float = HERM_TOL) -> bool:
    a = np.asarray(a)
    return a.ndim == 2 and a.shape[0] == a.shape[1] and bool(
        np.max(np.abs(a - a.conj().T), initial=0.0) <= tol
    )


def as_hermitian(a, tol: float = HERM_TOL) -> np.ndarray:
    m = as_square(a)
    if not is_hermitian(m, tol):
        raise ValidationError("matrix is not Hermitian")
    return 0.5 * (m + m.conj().T)


def as_density_matrix(a, tol: float = PSD_TOL) -> np.ndarray:
    """Validate a density matrix: Hermitian, unit trace, PSD.

    Inputs failing the PSD test are rejected rather than clipped.
    """
    m = as_hermitian(a, HERM_TOL)
    tr = np.trace(m).real
    if abs(tr - 1.0) > TRACE_TOL:
        raise ValidationError(f"trace is {tr!r}, expected 1")
    lo = np.linalg.eigvalsh(m)[0]
    if lo < -tol:
        raise ValidationError(f"matrix is not PSD (min eigenvalue {lo:.3e})")
    return m


def as_pure_state(v, tol: float = NORM_TOL) -> np.ndarray:
    s = np.asarray(v, dtype=complex)
    if s.ndim != 1:
        raise ShapeError(f"expected a state vector, got shape {s.shape}")
    nrm = np.linalg.norm(s)
    if abs(nrm - 1.0) > tol:
        raise ValidationError(f"state vector has norm {nrm!r}, expected 1")
    return s


def projector(v) -> np.ndarray:
    """Return ``|v><v|``."""
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


def check_cap(dim: int, cap: int = DEFAULT_CAP, what: str = "operator") -> None:
    if dim > cap:
        raise DimensionLimitError(dim, cap, what)


def kron(a, b, cap: int = DEFAULT_CAP) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    check_cap(a.shape[0] * b.shape[0], cap)
    check_cap(a.shape[1] * b.shape[1], cap)
    return np.kron(a, b)


def kron_all(mats: Iterable, cap: int = DEFAULT_CAP) -> np.ndarray:
    """Kronecker product of a sequence, left to right."""
    return reduce(lambda x, y: kron(x, y, cap), mats, np.ones((1, 1), dtype=complex))


def partial_trace(rho, factor_dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Trace out every tensor factor not listed in ``keep``.

    Parameters
    ----------
    rho : (D, D) array
        Operator on ``H_0 (x) H_1 (x) ...`` with ``D = prod(factor_dims)``.
    factor_dims : sequence of int
        Dimensions of the tensor factors, in order.
    keep : iterable of int
        Factor indices to retain. The result acts on the kept factors in
        increasing index order.
    """
    rho = as_square(rho)
    dims = [int(d) for d in factor_dims]
    keep = sorted(set(keep))
    n = len(dims)
    if int(np.prod(dims)) != rho.shape[0]:
        raise ShapeError(f"factor dims {dims} do not multiply to {rho.shape[0]}")
    if not keep:
        raise ShapeError("keep must name at least one factor")
    if keep[0] < 0 or keep[-1] >= n:
        raise ShapeError(f"keep indices {keep} out of range for {n} factors")
    if 2 * n > len(string.ascii_letters):
        raise ShapeError("too many tensor factors")
    letters = string.ascii_letters
    row = list(letters[:n])
    col = [letters[n + k] if k in keep else row[k] for k in range(n)]
    out = [row[k] for k in keep] + [col[k] for k in keep]
    spec = "".join(row) + "".join(col) + "->" + "".join(out)
    kept = int(np.prod([dims[k] for k in keep]))
    return np.einsum(spec, rho.reshape(dims + dims)).reshape(kept, kept)


def herm_eig(a, tol: float = HERM_TOL):
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    Returns
    -------
    w : (n,) float array
    v : (n, n) unitary array with ``a = v @ diag(w) @ v^dagger``
    """
    h = as_hermitian(a, tol)
    return np.linalg.eigh(h)


def trace_norm(a) -> float:
    """Sum of singular values (sum of |eigenvalues| for Hermitian input)."""
    a = as_square(a)
    if is_hermitian(a, 1e-12):
        return float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (a + a.conj().T)))))
    return float(np.sum(np.linalg.svd(a, compute_uv=False)))


def trace_distance(rho, sigma) -> float:
    """Half the trace norm of the difference."""
    return 0.5 * trace_norm(np.asarray(rho) - np.asarray(sigma))


def psd_sqrt(rho) -> np.ndarray:
    w, v = herm_eig(rho)
    if w[0] < -PSD_TOL:
        raise ValidationError(f"matrix is not PSD (min eigenvalue {w[0]:.3e})")
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def fidelity(rho, sigma) -> float:
    """Squared fidelity ``||sqrt(rho) sqrt(sigma)||_1 ** 2``, in [0, 1]."""
    rho = as_density_matrix(rho)
    sigma = as_density_matrix(sigma)
    if rho.shape != sigma.shape:
        raise ShapeError(f"shape mismatch {rho.shape} vs {sigma.shape}")
    s = np.linalg.svd(psd_sqrt(rho) @ psd_sqrt(sigma), compute_uv=False)
    return float(min(1.0, np.sum(s) ** 2))


def unitary_exp(h, s: float) -> np.ndarray:
    """``exp(-i s h)`` for Hermitian ``h``, via eigendecomposition."""
    w, v = herm_eig(h)
    return (v * np.exp(-1j * s * w)) @ v.conj().T


def support_projector(rho, tol: float = PSD_TOL) -> np.ndarray:
    """Projector onto the span of eigenvectors with eigenvalue above ``tol``."""
    w, v = herm_eig(rho)
    sel = v[:, w > tol]
    return sel @ sel.conj().T


def embed(op, site: int, dims: Sequence[int], cap: int = DEFAULT_CAP) -> np.ndarray:
    """Place ``op`` on factor ``site`` of a tensor product, identity elsewhere."""
    op = as_square(op)
    if not 0 <= site < len(dims) or op.shape[0] != dims[site]:
        raise ShapeError(f"operator of size {op.shape[0]} does not fit factor {site} of {list(dims)}")
    mats = [op if k == site else np.eye(d) for k, d in enumerate(dims)]
    return kron_all(mats, cap)
