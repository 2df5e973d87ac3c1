# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels in ``_kernels_py``."""
from libc.math cimport exp, hypot, sqrt

import numpy as np


def mode_l1_all(const double complex[:, :] rho, const Py_ssize_t[:, :] labels,
                Py_ssize_t nmodes):
    cdef Py_ssize_t i, j, d = rho.shape[0]
    out = np.zeros(nmodes)
    cdef double[:] acc = out
    cdef double complex z
    for i in range(d):
        for j in range(rho.shape[1]):
            z = rho[i, j]
            acc[labels[i, j]] += hypot(z.real, z.imag)
    return out


def coherence_bound(const double[:, :] absrho, const double[:] wn, const double[:] wm,
                    const Py_ssize_t[:, :] labels, Py_ssize_t target, bint restrict):
    cdef Py_ssize_t c, e
    cdef double total = 0.0
    for c in range(absrho.shape[0]):
        for e in range(absrho.shape[1]):
            if restrict and labels[c, e] != target:
                continue
            total += absrho[c, e] * sqrt(wn[c] * wm[e])
    return total


def thermal_bound_sum(const double[:, :] absrho, const double[:] energies,
                      const Py_ssize_t[:, :] labels, Py_ssize_t n, Py_ssize_t m,
                      double beta):
    cdef Py_ssize_t c, e
    cdef Py_ssize_t target = labels[n, m]
    cdef double total = 0.0, gap, factor
    for c in range(absrho.shape[0]):
        gap = energies[n] - energies[c]
        factor = 1.0 if gap <= 0.0 else exp(-beta * gap)
        for e in range(absrho.shape[1]):
            if labels[c, e] == target:
                total += absrho[c, e] * factor
    return total


cdef inline double _eval(const double[:] x, const double[:] y, double t) nogil:
    cdef Py_ssize_t lo = 0, hi = x.shape[0], mid, n = x.shape[0]
    # last index with x[k] <= t
    while lo < hi:
        mid = (lo + hi) // 2
        if x[mid] <= t:
            lo = mid + 1
        else:
            hi = mid
    cdef Py_ssize_t k = lo - 1
    if k < 0:
        k = 0
    if k >= n - 1:
        return y[n - 1]
    return y[k] + (y[k + 1] - y[k]) * (t - x[k]) / (x[k + 1] - x[k])


def lorenz_evaluate(const double[:] x, const double[:] y, t):
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    cdef const double[:] tv = ts
    out = np.empty(ts.shape[0])
    cdef double[:] ov = out
    cdef Py_ssize_t i
    for i in range(tv.shape[0]):
        ov[i] = _eval(x, y, tv[i])
    return out if np.ndim(t) else out[0]


def lorenz_dominates(const double[:] x1, const double[:] y1,
                     const double[:] x2, const double[:] y2, double slack):
    cdef Py_ssize_t i
    cdef double t
    for i in range(x1.shape[0]):
        t = x1[i]
        if _eval(x1, y1, t) < _eval(x2, y2, t) - slack:
            return False
    for i in range(x2.shape[0]):
        t = x2[i]
        if _eval(x1, y1, t) < _eval(x2, y2, t) - slack:
            return False
    return True
