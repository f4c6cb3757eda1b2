# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled stochastic heavy-ball chunk loop; mirrors _pyloop.hb_chunk."""
from libc.math cimport sqrt


def hb_chunk(double[::1] x, double[::1] v, double[::1] lam, bint cubic,
             double alpha, double eps, double sigma1, double sigma2,
             double[:, ::1] z2, double[:, ::1] z1, double f_stop):
    """See _pyloop.hb_chunk for the contract."""
    cdef Py_ssize_t n = z2.shape[0]
    cdef Py_ssize_t d = x.shape[0]
    cdef Py_ssize_t i, j
    cdef double a = 1.0 - alpha * eps
    cdef double r, fval, g
    for i in range(n):
        if cubic:
            r = 0.0
            for j in range(d):
                r += x[j] * x[j]
            r = sqrt(r)
            for j in range(d):
                g = (2.0 * lam[j] + 3.0 * r) * x[j]
                v[j] = a * v[j] - eps * (g + sigma2 * z2[i, j])
        else:
            for j in range(d):
                g = lam[j] * x[j]
                v[j] = a * v[j] - eps * (g + sigma2 * z2[i, j])
        if sigma1 != 0.0:
            for j in range(d):
                x[j] = x[j] + eps * (v[j] + sigma1 * z1[i, j])
        else:
            for j in range(d):
                x[j] = x[j] + eps * v[j]
        if cubic:
            fval = 0.0
            r = 0.0
            for j in range(d):
                fval += lam[j] * x[j] * x[j]
                r += x[j] * x[j]
            r = sqrt(r)
            fval += r * r * r
        else:
            fval = 0.0
            for j in range(d):
                fval += 0.5 * lam[j] * x[j] * x[j]
        if fval < f_stop:
            return i
    return -1
