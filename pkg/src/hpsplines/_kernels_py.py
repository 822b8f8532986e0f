"""Pure-Python (NumPy) implementations of the numerical kernels.

Mirrors the API of the compiled extension ``hpsplines._kernels``; selected
at import time by :mod:`hpsplines._backend` when the extension is missing
or disabled.
"""

import math

import numpy as np

BACKEND_NAME = 'python'


def eval_piecewise(breaks, offsets, coefs, powers, rates, x):
    """Evaluate a piecewise sum of ``c * x**p * exp(r*x)`` terms.

    ``breaks`` holds the K+1 breakpoints; piece ``k`` owns the flattened
    terms ``offsets[k]:offsets[k+1]``. Pieces are half-open on the right,
    the last piece is closed, and everything outside the support is zero.
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    out = np.zeros_like(x)
    n_pieces = len(breaks) - 1
    inside = (x >= breaks[0]) & (x <= breaks[-1])
    idx = np.searchsorted(breaks, x, side='right') - 1
    idx = np.clip(idx, 0, n_pieces - 1)
    for k in range(n_pieces):
        mask = inside & (idx == k)
        if not mask.any():
            continue
        xs = x[mask]
        acc = np.zeros_like(xs)
        for t in range(offsets[k], offsets[k + 1]):
            acc += coefs[t] * xs ** powers[t] * np.exp(rates[t] * xs)
        out[mask] = acc
    return out


def banded_cholesky_factor(ab):
    """Cholesky factorization of a symmetric banded matrix.

    ``ab`` is the lower-band storage, shape (bw+1, n) with
    ``ab[d, j] = A[j+d, j]``. Returns ``(L, fail)`` where ``fail`` is the
    index of the first non-positive pivot, or -1 on success. ``L`` uses the
    same storage layout.
    """
    ab = np.asarray(ab, dtype=np.float64)
    bw = ab.shape[0] - 1
    n = ab.shape[1]
    L = ab.copy()
    for j in range(n):
        lo = max(0, j - bw)
        s = L[0, j]
        for k in range(lo, j):
            s -= L[j - k, k] * L[j - k, k]
        if not s > 0.0:
            return L, j
        piv = math.sqrt(s)
        L[0, j] = piv
        top = min(j + bw, n - 1)
        for i in range(j + 1, top + 1):
            s = L[i - j, j]
            for k in range(max(0, i - bw), j):
                s -= L[i - k, k] * L[j - k, k]
            L[i - j, j] = s / piv
    return L, -1


def banded_cholesky_solve(L, b):
    """Solve ``L L^T x = b`` for factored lower-band ``L``.

    ``b`` may be a vector or a matrix of stacked right-hand-side columns.
    """
    L = np.asarray(L, dtype=np.float64)
    bw = L.shape[0] - 1
    n = L.shape[1]
    x = np.array(b, dtype=np.float64, copy=True)
    one_dim = x.ndim == 1
    if one_dim:
        x = x[:, None]
    for i in range(n):
        for k in range(max(0, i - bw), i):
            x[i] -= L[i - k, k] * x[k]
        x[i] /= L[0, i]
    for i in range(n - 1, -1, -1):
        for k in range(i + 1, min(i + bw, n - 1) + 1):
            x[i] -= L[k - i, i] * x[k]
        x[i] /= L[0, i]
    return x[:, 0] if one_dim else x
