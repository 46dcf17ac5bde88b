"""Pure-numpy implementations of the hot kernels.

Selected by :mod:`sbsbound.kernels` when the compiled ``_ckernels`` module is
unavailable (or when ``SBSBOUND_PURE_PYTHON=1``).
"""

import numpy as np


def mgs(vectors, drop_tol=-1.0):
    """Modified Gram-Schmidt with one full reorthogonalization pass.

    Parameters
    ----------
    vectors : (n, d) complex array
        Rows are the input vectors, in processing order.
    drop_tol : float
        A vector whose squared residual norm is ``<= drop_tol`` is treated as
        dependent: its output row stays zero and ``kept`` is False. Negative
        disables dropping (only an exactly zero residual is dropped).

    Returns
    -------
    phi : (n, d) complex array
        Orthonormal rows (zero rows for dropped vectors).
    alpha : (n,) float array
        Residual norm of each input after projecting out earlier kept rows.
    kept : (n,) bool array
    """
    v = np.array(vectors, dtype=complex)
    n, d = v.shape
    phi = np.zeros((n, d), dtype=complex)
    alpha = np.zeros(n)
    kept = np.zeros(n, dtype=bool)
    for i in range(n):
        w = v[i].copy()
        for _ in range(2):
            for k in range(i):
                if kept[k]:
                    w -= np.vdot(phi[k], w) * phi[k]
        nrm = np.linalg.norm(w)
        alpha[i] = nrm
        if nrm * nrm <= drop_tol or nrm == 0.0:
            continue
        kept[i] = True
        phi[i] = w / nrm
    return phi, alpha, kept


def _residual_norms(rhos, n0, n1):
    # rhos: (2, 2) single state; n0, n1: broadcast grids of unit-vector entries
    q = (np.conj(n0) * (rhos[0, 0] * n0 + rhos[0, 1] * n1)
         + np.conj(n1) * (rhos[1, 0] * n0 + rhos[1, 1] * n1)).real
    a = rhos[0, 0].real - q * np.abs(n0) ** 2
    d = rhos[1, 1].real - q * np.abs(n1) ** 2
    b = rhos[0, 1] - q * n0 * np.conj(n1)
    return np.maximum(np.abs(a + d), 2.0 * np.sqrt(0.25 * (a - d) ** 2 + np.abs(b) ** 2))


def pvm_grid_objective(rhos, probs, thetas, phis):
    """Evaluate ``sum_i p_i ||rho_i - P_i rho_i P_i||_1`` over a Bloch grid.

    ``P_1 = |n><n|`` with ``n = (cos(theta/2), e^{i phi} sin(theta/2))`` and
    ``P_2 = 1 - P_1``. Returns an array of shape ``(len(thetas), len(phis))``.
    """
    rhos = np.asarray(rhos, dtype=complex)
    th = np.asarray(thetas, dtype=float)[:, None]
    ph = np.asarray(phis, dtype=float)[None, :]
    ct = np.cos(0.5 * th) + 0j * ph
    e = np.exp(1j * ph)
    st = np.sin(0.5 * th)
    n0, n1 = ct, e * st
    m0, m1 = -np.conj(e) * st, ct
    return probs[0] * _residual_norms(rhos[0], n0, n1) + probs[1] * _residual_norms(rhos[1], m0, m1)
