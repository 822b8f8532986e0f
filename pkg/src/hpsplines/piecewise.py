"""Piecewise exponential-polynomial functions and their exact convolution.

Functions here are finitely supported sums of ``c * x**p * exp(r*x)`` terms
on consecutive breakpoint intervals. The class is closed under convolution:
the convolution integral of two such terms is again a finite combination of
the same kind, obtained by analytic integration. Repeated convolution of
first-order exponential kernels is how the bell-shaped basis functions in
:mod:`hpsplines.basis` are built.

Pieces are half-open ``[xi_k, xi_{k+1})`` with the last piece closed, so
evaluation at a breakpoint is deterministic; for anything smoother than the
first-order kernel the choice is invisible because the function is
continuous there.
"""

import math
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from . import _backend

# Two exponential rates closer than this (relative) are treated as equal,
# which routes the convolution integral through the power-raising branch
# instead of dividing by a vanishing rate difference.
RATE_TOL = 1e-12

# Breakpoints closer than this (relative to the support scale) collapse
# into one.
_BREAK_TOL = 1e-12


class ExpoTerm(NamedTuple):
    """One ``coefficient * x**power * exp(rate*x)`` term."""

    coefficient: float
    power: int
    rate: float


@dataclass(frozen=True)
class PiecewiseExpo:
    """A compactly supported piecewise exponential-polynomial function.

    Parameters
    ----------
    breakpoints : numpy.ndarray, shape (K+1,)
        Strictly increasing breakpoints; the support is
        ``[breakpoints[0], breakpoints[-1]]``.
    pieces : tuple of tuples of ExpoTerm
        ``pieces[k]`` holds the terms active on
        ``[breakpoints[k], breakpoints[k+1])``.
    """

    breakpoints: np.ndarray
    pieces: tuple

    def __post_init__(self):
        bp = np.ascontiguousarray(self.breakpoints, dtype=np.float64)
        if bp.ndim != 1 or bp.size < 2:
            raise ValueError('need at least two breakpoints')
        if not np.all(np.isfinite(bp)):
            raise ValueError('breakpoints must be finite')
        if not np.all(np.diff(bp) > 0):
            raise ValueError('breakpoints must be strictly increasing')
        pieces = tuple(tuple(ExpoTerm(*t) for t in piece) for piece in self.pieces)
        if len(pieces) != bp.size - 1:
            raise ValueError(
                f'{bp.size - 1} intervals but {len(pieces)} piece definitions'
            )
        for piece in pieces:
            for term in piece:
                if term.power < 0 or term.power != int(term.power):
                    raise ValueError(f'term power must be a non-negative integer: {term}')
                if not (math.isfinite(term.coefficient) and math.isfinite(term.rate)):
                    raise ValueError(f'term has non-finite data: {term}')
        bp.setflags(write=False)
        object.__setattr__(self, 'breakpoints', bp)
        object.__setattr__(self, 'pieces', pieces)

    @property
    def support(self):
        """(left, right) endpoints of the support interval."""
        return float(self.breakpoints[0]), float(self.breakpoints[-1])

    @property
    def piece_count(self):
        return len(self.pieces)

    @cached_property
    def _flat(self):
        # Flattened term arrays in the layout the evaluation kernels expect.
        coefs, powers, rates, offsets = [], [], [], [0]
        for piece in self.pieces:
            for term in piece:
                coefs.append(term.coefficient)
                powers.append(term.power)
                rates.append(term.rate)
            offsets.append(len(coefs))
        return (
            self.breakpoints,
            np.asarray(offsets, dtype=np.int64),
            np.asarray(coefs, dtype=np.float64),
            np.asarray(powers, dtype=np.int64),
            np.asarray(rates, dtype=np.float64),
        )

    def __call__(self, x):
        """Evaluate at a scalar or an array of points; zero outside support."""
        arr = np.asarray(x, dtype=np.float64)
        breaks, offsets, coefs, powers, rates = self._flat
        out = _backend.eval_piecewise(
            breaks, offsets, coefs, powers, rates, arr.ravel()
        )
        if arr.ndim == 0:
            return float(out[0])
        return out.reshape(arr.shape)

    def dilated(self, h):
        """Return ``x -> f(x / h)`` for ``h > 0``, computed exactly.

        Breakpoints scale by ``h``; a term ``c * x**p * exp(r*x)`` becomes
        ``(c / h**p) * x**p * exp((r/h) * x)``.
        """
        if not (h > 0):
            raise ValueError(f'dilation factor must be positive, got {h!r}')
        pieces = tuple(
            tuple(ExpoTerm(t.coefficient / h ** t.power, t.power, t.rate / h) for t in piece)
            for piece in self.pieces
        )
        return PiecewiseExpo(self.breakpoints * h, pieces)


def evaluate(f, x):
    """Evaluate ``f`` at ``x`` (scalar or array). Zero outside the support."""
    return f(x)


def first_order_kernel(alpha):
    """The first-order exponential kernel ``exp(alpha*x)`` on [0, 1].

    Single piece, single term; the building block every higher-order basis
    function is convolved from.
    """
    alpha = float(alpha)
    if not math.isfinite(alpha):
        raise ValueError(f'frequency must be finite, got {alpha!r}')
    return PiecewiseExpo(
        np.array([0.0, 1.0]), ((ExpoTerm(1.0, 0, alpha),),)
    )


class _RateRegistry:
    """Canonicalizes nearly-equal exponential rates to a shared value."""

    def __init__(self):
        self.values = []

    def key(self, rate):
        for i, known in enumerate(self.values):
            if abs(rate - known) <= RATE_TOL * max(1.0, abs(rate), abs(known)):
                return i
        self.values.append(rate)
        return len(self.values) - 1


def _falling(m, r):
    """m * (m-1) * ... * (m-r+1); equals 1 for r = 0."""
    out = 1.0
    for i in range(r):
        out *= m - i
    return out


def _add_term(acc, power, rate_key, coeff):
    key = (power, rate_key)
    acc[key] = acc.get(key, 0.0) + coeff


def _accumulate_bound(acc, scale, bound, m, resonant, mu, rho_key, sigma_key,
                      extra_power):
    """Add the antiderivative of ``t**m * exp(mu*t)`` evaluated at one bound.

    ``bound`` is ``('c', c0)`` for the constant bound ``t = c0`` or
    ``('x', c0)`` for the moving bound ``t = x - c0``. The caller has already
    folded the ``exp(sigma*x) * x**extra_power`` prefactor into how terms are
    keyed: constant-bound contributions keep rate ``sigma``; moving-bound
    contributions pick up ``exp(mu*x)`` and land on rate ``rho``.
    """
    kind, c0 = bound
    if resonant:
        # antiderivative t**(m+1) / (m+1)
        base = scale / (m + 1)
        if kind == 'c':
            _add_term(acc, extra_power, sigma_key, base * c0 ** (m + 1))
        else:
            for s in range(m + 2):
                coeff = base * math.comb(m + 1, s) * (-c0) ** (m + 1 - s)
                if coeff != 0.0:
                    _add_term(acc, extra_power + s, sigma_key, coeff)
        return
    # antiderivative exp(mu*t) * sum_r (-1)**r * m!/(m-r)! * t**(m-r) / mu**(r+1)
    if kind == 'c':
        val = 0.0
        for r in range(m + 1):
            val += (-1.0) ** r * _falling(m, r) * c0 ** (m - r) / mu ** (r + 1)
        _add_term(acc, extra_power, sigma_key, scale * math.exp(mu * c0) * val)
    else:
        damp = math.exp(-mu * c0)
        for r in range(m + 1):
            cr = (-1.0) ** r * _falling(m, r) / mu ** (r + 1)
            for s in range(m - r + 1):
                coeff = (
                    scale * damp * cr * math.comb(m - r, s) * (-c0) ** (m - r - s)
                )
                if coeff != 0.0:
                    _add_term(acc, extra_power + s, rho_key, coeff)


def _accumulate_pair(acc, rates, term_f, term_g, lo, hi):
    """Accumulate ``int term_f(t) * term_g(x - t) dt`` between two bounds.

    With ``term_f = cf * t**p * exp(rho*t)`` and
    ``term_g = cg * u**q * exp(sigma*u)`` the integrand expands through the
    binomial theorem into ``x**(q-k) * exp(sigma*x) * t**(p+k) * exp(mu*t)``
    pieces with ``mu = rho - sigma``; each inner factor integrates in closed
    form. Equal rates (``mu ~ 0``) raise the polynomial power by one instead.
    """
    cf, p, rho = term_f
    cg, q, sigma = term_g
    c = cf * cg
    if c == 0.0:
        return
    mu = rho - sigma
    resonant = abs(mu) <= RATE_TOL * max(1.0, abs(rho), abs(sigma))
    sigma_key = rates.key(sigma)
    rho_key = sigma_key if resonant else rates.key(rho)
    for k in range(q + 1):
        pre = c * math.comb(q, k) * (-1.0) ** k
        m = p + k
        extra = q - k
        _accumulate_bound(acc, pre, hi, m, resonant, mu, rho_key, sigma_key, extra)
        _accumulate_bound(acc, -pre, lo, m, resonant, mu, rho_key, sigma_key, extra)


def _canonical(acc, rates):
    """Sorted ExpoTerm tuple from an accumulator, dropping exact zeros."""
    terms = [
        ExpoTerm(coeff, power, rates.values[rate_key])
        for (power, rate_key), coeff in acc.items()
        if coeff != 0.0
    ]
    terms.sort(key=lambda t: (t.power, t.rate))
    return tuple(terms)


def convolve(f, g):
    """Exact convolution of two compactly supported piecewise exponentials.

    Result breakpoints are the pairwise sums of the input breakpoints. On
    each result interval every overlapping piece pair contributes an
    analytically integrated slice whose integration bounds are either
    constants or ``x - const``, fixed per interval; the integrals are
    accumulated term by term via :func:`_accumulate_pair`.

    Parameters
    ----------
    f, g : PiecewiseExpo

    Returns
    -------
    PiecewiseExpo
        Supported on ``[f.lo + g.lo, f.hi + g.hi]``.
    """
    fb, gb = f.breakpoints, g.breakpoints
    sums = np.sort(np.add.outer(fb, gb).ravel())
    scale = max(1.0, abs(sums[0]), abs(sums[-1]))
    bps = [float(sums[0])]
    for s in sums[1:]:
        if s - bps[-1] > _BREAK_TOL * scale:
            bps.append(float(s))
    if len(bps) < 2:
        raise ValueError('convolution support collapsed; inputs degenerate')

    rates = _RateRegistry()
    pieces = []
    for left, right in zip(bps[:-1], bps[1:]):
        xm = 0.5 * (left + right)
        acc = {}
        for i in range(f.piece_count):
            a0, a1 = fb[i], fb[i + 1]
            if not f.pieces[i]:
                continue
            for j in range(g.piece_count):
                b0, b1 = gb[j], gb[j + 1]
                if not g.pieces[j]:
                    continue
                if xm <= a0 + b0 or xm >= a1 + b1:
                    continue
                # t ranges over [max(a0, x-b1), min(a1, x-b0)]; which side of
                # each max/min binds is constant on (left, right).
                lo = ('c', float(a0)) if a0 >= xm - b1 else ('x', float(b1))
                hi = ('c', float(a1)) if a1 <= xm - b0 else ('x', float(b0))
                for term_f in f.pieces[i]:
                    for term_g in g.pieces[j]:
                        _accumulate_pair(acc, rates, term_f, term_g, lo, hi)
        pieces.append(_canonical(acc, rates))
    return PiecewiseExpo(np.asarray(bps), tuple(pieces))
