"""Penalized least-squares fitting in the exponential B-spline basis.

The fitted curve minimizes ``sum_i w_i (y_i - s(x_i))**2 + lam * |D a|**2``
over coefficient vectors ``a``, where ``D`` is the exponential second
difference of :mod:`hpsplines.penalty`. The normal-equation matrix
``B^T W B + lam * D^T D`` is symmetric positive definite with bandwidth 3,
so assembly and solve both run in O(m + n) through banded kernels.
"""

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np

from . import _backend
from .basis import HBBasis, build_knot_grid
from .errors import SingularSystemError
from .penalty import PenaltyOperator

#: Diagonals kept in the banded normal matrix (bandwidth 3 plus the main one).
SYSTEM_DIAGONALS = 4


def default_knot_count(m):
    """Default interior knot count for ``m`` data sites: ``max(4, m//4 + 1)``."""
    return max(4, int(m) // 4 + 1)


@dataclass(frozen=True)
class FitProblem:
    """Weighted scattered data ``(sites, values, weights)``.

    Sites must be strictly increasing and at least two; weights default to
    one and must be strictly positive.
    """

    sites: np.ndarray
    values: np.ndarray
    weights: Optional[np.ndarray] = None

    def __post_init__(self):
        sites = np.ascontiguousarray(self.sites, dtype=np.float64)
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        if sites.ndim != 1 or values.shape != sites.shape:
            raise ValueError('sites and values must be 1-d arrays of equal length')
        if sites.size < 2:
            raise ValueError(f'need at least two data sites, got {sites.size}')
        if not (np.all(np.isfinite(sites)) and np.all(np.isfinite(values))):
            raise ValueError('sites and values must be finite')
        if not np.all(np.diff(sites) > 0):
            raise ValueError('sites must be strictly increasing')
        if self.weights is None:
            weights = np.ones_like(sites)
        else:
            weights = np.ascontiguousarray(self.weights, dtype=np.float64)
            if weights.shape != sites.shape:
                raise ValueError('weights must match the sites in length')
            if not np.all(np.isfinite(weights)) or not np.all(weights > 0):
                raise ValueError('weights must be finite and strictly positive')
        for name, arr in (('sites', sites), ('values', values), ('weights', weights)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def m(self):
        return self.sites.size


@dataclass(frozen=True)
class SymmetricBanded:
    """Symmetric positive (semi)definite matrix in lower-band storage.

    ``ab[d, j] = A[j + d, j]``; row 0 is the main diagonal.
    """

    ab: np.ndarray

    @property
    def bandwidth(self):
        return self.ab.shape[0] - 1

    @property
    def order(self):
        return self.ab.shape[1]

    def toarray(self):
        n = self.order
        out = np.zeros((n, n))
        for d in range(self.ab.shape[0]):
            idx = np.arange(n - d)
            out[idx + d, idx] = self.ab[d, :n - d]
            out[idx, idx + d] = self.ab[d, :n - d]
        return out


def _collocation_parts(problem, grid, alpha):
    """Banded design, banded Gram ``B^T W B`` and right side ``B^T W y``."""
    coll = HBBasis(grid, alpha).collocation(problem.sites)
    nb = grid.n_basis
    gram = np.zeros((SYSTEM_DIAGONALS, nb))
    rhs = np.zeros(nb)
    w = problem.weights
    wy = w * problem.values
    v = coll.values
    fc = coll.first_col
    for p in range(SYSTEM_DIAGONALS):
        np.add.at(rhs, fc + p, v[:, p] * wy)
        for q in range(p, SYSTEM_DIAGONALS):
            np.add.at(gram[q - p], fc + p, w * v[:, p] * v[:, q])
    return coll, gram, rhs


def _penalty_gram(op, n_basis):
    """Lower-band storage of ``D^T D`` (three diagonals)."""
    c = op.stencil
    out = np.zeros((op.row_bandwidth, n_basis))
    for p in range(op.row_bandwidth):
        for q in range(p, op.row_bandwidth):
            out[q - p, p:p + op.n] += c[p] * c[q]
    return out


def assemble_system(problem, grid, alpha, lam):
    """Banded normal equations ``(B^T W B + lam * D^T D) a = B^T W y``.

    Returns
    -------
    (SymmetricBanded, numpy.ndarray)
        The system matrix in lower-band storage and the right-hand side.
    """
    if not (lam >= 0) or not math.isfinite(lam):
        raise ValueError(f'penalty weight must be finite and >= 0, got {lam!r}')
    _, gram, rhs = _collocation_parts(problem, grid, alpha)
    ab = gram
    if lam != 0.0:
        op = PenaltyOperator(alpha, grid.h, grid.n)
        ab[:op.row_bandwidth] += lam * _penalty_gram(op, grid.n_basis)
    return SymmetricBanded(ab), rhs


def solve_spd_banded(system, rhs):
    """Solve a symmetric positive definite banded system by Cholesky.

    Raises
    ------
    SingularSystemError
        On the first non-positive pivot; its ``index`` attribute names the
        offending column.
    """
    factor, fail = _backend.banded_cholesky_factor(system.ab)
    if fail >= 0:
        raise SingularSystemError(fail)
    return _backend.banded_cholesky_solve(factor, rhs)


@dataclass(frozen=True)
class Diagnostics:
    """Quantities recorded at fit time."""

    rss: float
    edf: Optional[float] = None


@dataclass(frozen=True)
class HPSplineModel:
    """A fitted spline: grid, frequency, penalty weight and coefficients."""

    grid: object
    alpha: float
    lam: float
    coefficients: np.ndarray
    diagnostics: Optional[Diagnostics] = None

    def __post_init__(self):
        coef = np.ascontiguousarray(self.coefficients, dtype=np.float64)
        if coef.shape != (self.grid.n_basis,):
            raise ValueError(
                f'expected {self.grid.n_basis} coefficients, got {coef.shape}'
            )
        coef.setflags(write=False)
        object.__setattr__(self, 'coefficients', coef)

    @cached_property
    def _basis(self):
        return HBBasis(self.grid, self.alpha)

    def predict(self, x):
        """Evaluate the fitted curve at ``x`` inside ``[a, b]``.

        Raises
        ------
        DomainError
            The basis carries no information outside the grid interval, so
            extrapolation is refused rather than silently returning zeros.
        """
        arr = np.asarray(x, dtype=np.float64)
        out = self._basis.evaluate_combination(self.coefficients, arr.ravel())
        if arr.ndim == 0:
            return float(out[0])
        return out.reshape(arr.shape)

    def __call__(self, x):
        return self.predict(x)


def fit(problem, alpha, lam=1.0, n=None, grid=None):
    """Fit a penalized exponential spline to scattered data.

    Parameters
    ----------
    problem : FitProblem
    alpha : float
        Frequency of the basis and of the difference penalty. The damped
        pair ``exp(-alpha*x)``, ``x*exp(-alpha*x)`` passes through the
        penalty untouched; data from that family is reproduced exactly for
        every ``lam``.
    lam : float
        Penalty weight, >= 0. With ``lam = 0`` the problem is pure least
        squares and needs at least ``n + 2`` data sites.
    n : int, optional
        Interior knot count; defaults to :func:`default_knot_count`.
    grid : KnotGrid, optional
        Explicit grid; overrides ``n`` and the default interval
        ``[sites[0], sites[-1]]``.

    Returns
    -------
    HPSplineModel
    """
    if not (lam >= 0) or not math.isfinite(lam):
        raise ValueError(f'penalty weight must be finite and >= 0, got {lam!r}')
    if grid is None:
        if n is None:
            n = default_knot_count(problem.m)
        grid = build_knot_grid(problem.sites[0], problem.sites[-1], n)
    if lam == 0.0 and problem.m < grid.n_basis:
        raise SingularSystemError(
            None,
            f'unpenalized fit needs at least {grid.n_basis} data sites for '
            f'{grid.n} knots, got {problem.m}; increase lambda or add data',
        )
    system, rhs = assemble_system(problem, grid, alpha, lam)
    coef = solve_spd_banded(system, rhs)
    model = HPSplineModel(grid, float(alpha), float(lam), coef)
    resid = problem.values - model.predict(problem.sites)
    rss = float(np.dot(problem.weights * resid, resid))
    return HPSplineModel(grid, float(alpha), float(lam), coef, Diagnostics(rss=rss))


def exponential_moments(sites, values, alpha, weights=None):
    """Damped moments ``sum w_i exp(-alpha*x_i) v_i`` and the same with ``x_i``.

    These two functionals of the data are conserved by the fit: evaluating
    them on the fitted values gives the same numbers as on the raw values,
    because the penalty annihilates the reproduction coefficients of the
    damped family. Sums are compensated (``math.fsum``) so the conservation
    check is not polluted by accumulation error.

    Returns
    -------
    (float, float)
        Order-zero and order-one damped moments.
    """
    sites = np.asarray(sites, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if weights is None:
        weights = np.ones_like(sites)
    damp = np.exp(-float(alpha) * sites) * np.asarray(weights, dtype=np.float64)
    m0 = math.fsum((damp * values).tolist())
    m1 = math.fsum((damp * sites * values).tolist())
    return m0, m1


@dataclass(frozen=True)
class FitReport:
    """Summary of a fit against its data."""

    alpha: float
    lam: float
    n: int
    a: float
    b: float
    m: int
    rss: float
    max_abs_residual: float
    relative_residual: float
    moments_data: tuple
    moments_fit: tuple
    moment_errors: tuple

    def as_dict(self):
        return {
            'alpha': self.alpha,
            'lambda': self.lam,
            'n': self.n,
            'interval': [self.a, self.b],
            'sites': self.m,
            'rss': self.rss,
            'max_abs_residual': self.max_abs_residual,
            'relative_residual': self.relative_residual,
            'moments_data': list(self.moments_data),
            'moments_fit': list(self.moments_fit),
            'moment_errors': list(self.moment_errors),
        }


def relative_residual(values, fitted):
    """Sup-norm residual relative to the sup norm of the data.

    Defined as ``max|y - yhat| / max|y|``; the denominator makes the measure
    meaningful even when individual data values vanish.
    """
    values = np.asarray(values, dtype=np.float64)
    fitted = np.asarray(fitted, dtype=np.float64)
    num = float(np.abs(values - fitted).max())
    den = float(np.abs(values).max())
    if den == 0.0:
        return 0.0 if num == 0.0 else math.inf
    return num / den


def fit_report(model, problem):
    """Build a :class:`FitReport` for ``model`` on ``problem``'s data."""
    fitted = model.predict(problem.sites)
    resid = problem.values - fitted
    rss = float(np.dot(problem.weights * resid, resid))
    data_m = exponential_moments(
        problem.sites, problem.values, model.alpha, problem.weights
    )
    fit_m = exponential_moments(problem.sites, fitted, model.alpha, problem.weights)
    errs = tuple(
        abs(fm - dm) / abs(dm) if dm != 0.0 else abs(fm - dm)
        for dm, fm in zip(data_m, fit_m)
    )
    return FitReport(
        alpha=model.alpha,
        lam=model.lam,
        n=model.grid.n,
        a=model.grid.a,
        b=model.grid.b,
        m=problem.m,
        rss=rss,
        max_abs_residual=float(np.abs(resid).max()),
        relative_residual=relative_residual(problem.values, fitted),
        moments_data=data_m,
        moments_fit=fit_m,
        moment_errors=errs,
    )
