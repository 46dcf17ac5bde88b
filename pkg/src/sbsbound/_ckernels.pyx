# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops. Mirrors ``_pykernels`` exactly; see that module for docs."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, cos, sin, fabs

cnp.import_array()

cdef extern from "complex.h" nogil:
    double creal(double complex)
    double cimag(double complex)
    double complex conj(double complex)


cdef inline double abs2(double complex z) nogil:
    return creal(z) * creal(z) + cimag(z) * cimag(z)


def mgs(vectors, double drop_tol=-1.0):
    cdef double complex[:, ::1] v = np.ascontiguousarray(vectors, dtype=np.complex128)
    cdef Py_ssize_t n = v.shape[0], d = v.shape[1]
    phi_arr = np.zeros((n, d), dtype=np.complex128)
    alpha_arr = np.zeros(n, dtype=np.float64)
    kept_arr = np.zeros(n, dtype=np.uint8)
    cdef double complex[:, ::1] phi = phi_arr
    cdef double[::1] alpha = alpha_arr
    cdef unsigned char[::1] kept = kept_arr
    cdef double complex[::1] w = np.empty(d, dtype=np.complex128)
    cdef Py_ssize_t i, k, a, sweep
    cdef double complex c
    cdef double nrm2, nrm
    with nogil:
        for i in range(n):
            for a in range(d):
                w[a] = v[i, a]
            for sweep in range(2):
                for k in range(i):
                    if not kept[k]:
                        continue
                    c = 0
                    for a in range(d):
                        c = c + conj(phi[k, a]) * w[a]
                    for a in range(d):
                        w[a] = w[a] - c * phi[k, a]
            nrm2 = 0.0
            for a in range(d):
                nrm2 = nrm2 + abs2(w[a])
            nrm = sqrt(nrm2)
            alpha[i] = nrm
            if nrm2 <= drop_tol or nrm == 0.0:
                continue
            kept[i] = 1
            for a in range(d):
                phi[i, a] = w[a] / nrm
    return phi_arr, alpha_arr, kept_arr.astype(bool)


cdef inline double herm2_trace_norm(double a, double d, double complex b) nogil:
    cdef double tr = fabs(a + d)
    cdef double gap = 2.0 * sqrt(0.25 * (a - d) * (a - d) + abs2(b))
    return tr if tr > gap else gap


cdef inline double residual(const double complex[:, :, ::1] r, Py_ssize_t s,
                            double complex n0, double complex n1) nogil:
    # || rho - (n^dag rho n) n n^dag ||_1 for a unit vector n
    cdef double complex r00 = r[s, 0, 0], r01 = r[s, 0, 1]
    cdef double complex r10 = r[s, 1, 0], r11 = r[s, 1, 1]
    cdef double q = creal(conj(n0) * (r00 * n0 + r01 * n1) + conj(n1) * (r10 * n0 + r11 * n1))
    return herm2_trace_norm(creal(r00) - q * abs2(n0),
                            creal(r11) - q * abs2(n1),
                            r01 - q * n0 * conj(n1))


def pvm_grid_objective(rhos, probs, thetas, phis):
    cdef const double complex[:, :, ::1] r = np.ascontiguousarray(rhos, dtype=np.complex128)
    cdef const double[::1] p = np.ascontiguousarray(probs, dtype=np.float64)
    cdef const double[::1] th = np.ascontiguousarray(thetas, dtype=np.float64)
    cdef const double[::1] ph = np.ascontiguousarray(phis, dtype=np.float64)
    cdef Py_ssize_t nt = th.shape[0], nph = ph.shape[0], i, j
    out_arr = np.empty((nt, nph), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double ct, st
    cdef double complex e, n0, n1, m0, m1
    with nogil:
        for i in range(nt):
            ct = cos(0.5 * th[i])
            st = sin(0.5 * th[i])
            for j in range(nph):
                e = cos(ph[j]) + 1j * sin(ph[j])
                n0 = ct
                n1 = e * st
                m0 = -conj(e) * st
                m1 = ct
                out[i, j] = p[0] * residual(r, 0, n0, n1) + p[1] * residual(r, 1, m0, m1)
    return out_arr
