"""Random states and operators for tests, presets and benchmarks.

All samplers take an explicit ``numpy.random.Generator``.
"""

import numpy as np


def ginibre(rng, rows, cols=None):
    cols = rows if cols is None else cols
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def random_unitary(rng, d):
    """Haar-random unitary (QR of a Ginibre matrix with phase correction)."""
    q, r = np.linalg.qr(ginibre(rng, d))
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_pure(rng, d):
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def random_density(rng, d, rank=None):
    """Random density matrix of the given rank (full rank by default)."""
    g = ginibre(rng, d, d if rank is None else rank)
    rho = g @ g.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


def random_hermitian(rng, d, scale=1.0):
    g = ginibre(rng, d)
    return scale * 0.5 * (g + g.conj().T)


def random_independent_set(rng, n, d, min_gram_eig=1e-6):
    """``n`` random unit vectors in ``C^d`` whose Gram matrix is well conditioned."""
    while True:
        vs = np.array([random_pure(rng, d) for _ in range(n)])
        if np.linalg.eigvalsh(vs.conj() @ vs.T)[0] > min_gram_eig:
            return vs


def random_probs(rng, n):
    p = rng.dirichlet(np.ones(n))
    return p / p.sum()
