# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled numerical kernels.

Same API and semantics as ``hpsplines._kernels_py``: piecewise
exponential-polynomial evaluation and banded Cholesky factor/solve.
"""

from libc.math cimport exp, sqrt

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND_NAME = 'compiled'


def eval_piecewise(const cnp.float64_t[::1] breaks,
                   const cnp.int64_t[::1] offsets,
                   const cnp.float64_t[::1] coefs,
                   const cnp.int64_t[::1] powers,
                   const cnp.float64_t[::1] rates,
                   object x):
    """Evaluate a piecewise sum of ``c * x**p * exp(r*x)`` terms.

    Pieces are half-open on the right, the last piece closed; zero outside
    the support (non-finite inputs count as outside).
    """
    cdef const cnp.float64_t[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t m = xv.shape[0]
    cdef cnp.ndarray out_arr = np.zeros(m, dtype=np.float64)
    cdef cnp.float64_t[::1] out = out_arr
    cdef Py_ssize_t n_pieces = breaks.shape[0] - 1
    cdef Py_ssize_t i, k, t, p
    cdef double xi, acc, mono
    cdef double lo = breaks[0], hi = breaks[n_pieces]
    for i in range(m):
        xi = xv[i]
        if not (xi >= lo and xi <= hi):
            continue
        # rightmost piece whose left edge is <= xi, clamped to the last
        k = n_pieces - 1
        if xi < hi:
            k = _bisect(breaks, xi, n_pieces)
        acc = 0.0
        for t in range(offsets[k], offsets[k + 1]):
            mono = coefs[t]
            for p in range(powers[t]):
                mono = mono * xi
            acc = acc + mono * exp(rates[t] * xi)
        out[i] = acc
    return out_arr


cdef inline Py_ssize_t _bisect(const cnp.float64_t[::1] breaks, double xi,
                               Py_ssize_t n_pieces):
    # index of the piece containing xi: largest k with breaks[k] <= xi
    cdef Py_ssize_t lo = 0, hi = n_pieces, mid
    while lo < hi:
        mid = (lo + hi) // 2
        if breaks[mid + 1] <= xi:
            lo = mid + 1
        else:
            hi = mid
    return lo


def banded_cholesky_factor(object ab):
    """Cholesky factor of a symmetric banded matrix in lower-band storage.

    Returns ``(L, fail)``; ``fail`` is the index of the first non-positive
    pivot or -1 on success.
    """
    cdef cnp.ndarray L_arr = np.array(ab, dtype=np.float64, order='C', copy=True)
    cdef cnp.float64_t[:, ::1] L = L_arr
    cdef Py_ssize_t bw = L.shape[0] - 1
    cdef Py_ssize_t n = L.shape[1]
    cdef Py_ssize_t i, j, k, lo, top
    cdef double s, piv
    for j in range(n):
        lo = j - bw
        if lo < 0:
            lo = 0
        s = L[0, j]
        for k in range(lo, j):
            s -= L[j - k, k] * L[j - k, k]
        if not s > 0.0:
            return L_arr, j
        piv = sqrt(s)
        L[0, j] = piv
        top = j + bw
        if top > n - 1:
            top = n - 1
        for i in range(j + 1, top + 1):
            s = L[i - j, j]
            lo = i - bw
            if lo < 0:
                lo = 0
            for k in range(lo, j):
                s -= L[i - k, k] * L[j - k, k]
            L[i - j, j] = s / piv
    return L_arr, -1


def banded_cholesky_solve(object L, object b):
    """Solve ``L L^T x = b``; ``b`` may be a vector or stacked columns."""
    cdef cnp.ndarray L_c = np.ascontiguousarray(L, dtype=np.float64)
    cdef const cnp.float64_t[:, ::1] Lv = L_c
    cdef cnp.ndarray b_arr = np.array(b, dtype=np.float64, copy=True)
    cdef bint one_dim = b_arr.ndim == 1
    if one_dim:
        b_arr = b_arr[:, None]
    cdef cnp.ndarray x_arr = np.ascontiguousarray(b_arr)
    cdef cnp.float64_t[:, ::1] x = x_arr
    cdef Py_ssize_t bw = Lv.shape[0] - 1
    cdef Py_ssize_t n = Lv.shape[1]
    cdef Py_ssize_t ncol = x.shape[1]
    cdef Py_ssize_t i, k, c, lo, top
    cdef double piv
    for i in range(n):
        lo = i - bw
        if lo < 0:
            lo = 0
        for k in range(lo, i):
            for c in range(ncol):
                x[i, c] -= Lv[i - k, k] * x[k, c]
        piv = Lv[0, i]
        for c in range(ncol):
            x[i, c] /= piv
    for i in range(n - 1, -1, -1):
        top = i + bw
        if top > n - 1:
            top = n - 1
        for k in range(i + 1, top + 1):
            for c in range(ncol):
                x[i, c] -= Lv[k - i, i] * x[k, c]
        piv = Lv[0, i]
        for c in range(ncol):
            x[i, c] /= piv
    return x_arr[:, 0] if one_dim else x_arr
