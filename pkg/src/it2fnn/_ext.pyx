# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the kernels in ``_pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport pow

cnp.import_array()


cdef inline void _insertion_sort(double* a, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double v
    for i in range(1, n):
        v = a[i]
        j = i - 1
        while j >= 0 and a[j] > v:
            a[j + 1] = a[j]
            j -= 1
        a[j + 1] = v


def median_filter(x, Py_ssize_t window):
    cdef const double[::1] src = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t n = src.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] dst = out
    if n == 0:
        return out
    cdef double[::1] buf = np.empty(window, dtype=np.float64)
    cdef Py_ssize_t before = window // 2
    cdef Py_ssize_t after = (window - 1) // 2
    cdef Py_ssize_t k, lo, hi, cnt, i
    with nogil:
        for k in range(n):
            lo = k - before
            if lo < 0:
                lo = 0
            hi = k + after
            if hi > n - 1:
                hi = n - 1
            cnt = hi - lo + 1
            for i in range(cnt):
                buf[i] = src[lo + i]
            _insertion_sort(&buf[0], cnt)
            if cnt % 2:
                dst[k] = buf[cnt // 2]
            else:
                dst[k] = 0.5 * (buf[cnt // 2 - 1] + buf[cnt // 2])
    return out


def max_sq_dist(X, C):
    cdef const double[:, ::1] xs = np.ascontiguousarray(X, dtype=np.float64)
    cdef const double[:, ::1] cs = np.ascontiguousarray(C, dtype=np.float64)
    cdef Py_ssize_t n = xs.shape[0], r = cs.shape[0], d = xs.shape[1]
    out = np.empty((n, r), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef Py_ssize_t k, i, j
    cdef double best, t
    with nogil:
        for k in range(n):
            for i in range(r):
                best = 0.0
                for j in range(d):
                    t = xs[k, j] - cs[i, j]
                    t = t * t
                    if t > best:
                        best = t
                o[k, i] = best
    return out


def fcm_update(X, U, double m, V_prev=None):
    cdef const double[:, ::1] xs = np.ascontiguousarray(X, dtype=np.float64)
    cdef const double[:, ::1] us = np.ascontiguousarray(U, dtype=np.float64)
    cdef Py_ssize_t n = xs.shape[0], d = xs.shape[1], r = us.shape[1]
    V = np.zeros((r, d), dtype=np.float64)
    V0 = np.zeros((r, d), dtype=np.float64) if V_prev is None else np.ascontiguousarray(V_prev, dtype=np.float64)
    U_new = np.empty((n, r), dtype=np.float64)
    cdef double[:, ::1] v = V
    cdef const double[:, ::1] v0 = V0
    cdef double[:, ::1] un = U_new
    cdef double[::1] wsum = np.zeros(r, dtype=np.float64)
    cdef double[::1] d2 = np.empty(r, dtype=np.float64)
    cdef double expo = 1.0 / (m - 1.0)
    cdef double J = 0.0
    cdef Py_ssize_t k, i, j, n_zero
    cdef double w, t, dmin, s
    with nogil:
        for k in range(n):
            for i in range(r):
                w = pow(us[k, i], m)
                wsum[i] += w
                for j in range(d):
                    v[i, j] += w * xs[k, j]
        for i in range(r):
            for j in range(d):
                if wsum[i] > 0.0:
                    v[i, j] /= wsum[i]
                else:
                    v[i, j] = v0[i, j]

        for k in range(n):
            n_zero = 0
            dmin = -1.0
            for i in range(r):
                s = 0.0
                for j in range(d):
                    t = xs[k, j] - v[i, j]
                    s += t * t
                d2[i] = s
                if s == 0.0:
                    n_zero += 1
                if dmin < 0.0 or s < dmin:
                    dmin = s
            if n_zero > 0:
                for i in range(r):
                    un[k, i] = 1.0 / n_zero if d2[i] == 0.0 else 0.0
            else:
                s = 0.0
                for i in range(r):
                    w = pow(dmin / d2[i], expo)
                    un[k, i] = w
                    s += w
                for i in range(r):
                    un[k, i] /= s
            for i in range(r):
                J += pow(un[k, i], m) * d2[i]
    return V, U_new, J
