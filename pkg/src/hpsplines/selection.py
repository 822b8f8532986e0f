"""Penalty-weight selection: GCV, L-curve, and the discrepancy principle.

All three methods sweep a logarithmic grid of candidate weights, reusing one
banded assembly per problem; only the penalty part of the normal matrix is
rebuilt per candidate. Effective degrees of freedom come from banded solves
against the Gram matrix, never from forming a dense hat matrix.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _backend
from .errors import DegenerateDFError, DiscrepancyRangeError
from .fitting import SymmetricBanded, _collocation_parts, _penalty_gram
from .penalty import PenaltyOperator

#: Relative slack within which two scores count as tied; ties resolve to the
#: smaller penalty weight.
TIE_REL = 1e-12

_METHODS = ('gcv', 'lcurve', 'discrepancy')


def default_lambda_grid():
    """61 log-spaced candidates from 1e-6 to 1e6 (includes 1.0)."""
    return np.geomspace(1e-6, 1e6, 61)


@dataclass(frozen=True)
class LambdaSearchSpec:
    """How to search for the penalty weight.

    Parameters
    ----------
    method : {'gcv', 'lcurve', 'discrepancy'}
    grid : numpy.ndarray
        Strictly increasing positive candidates.
    noise_level : float, optional
        Noise standard deviation; required by the discrepancy principle.
        Zero is allowed and makes the smallest candidate optimal.
    """

    method: str = 'gcv'
    grid: np.ndarray = field(default_factory=default_lambda_grid)
    noise_level: Optional[float] = None

    def __post_init__(self):
        if self.method not in _METHODS:
            raise ValueError(f'unknown method {self.method!r}; pick from {_METHODS}')
        grid = np.ascontiguousarray(self.grid, dtype=np.float64)
        if grid.ndim != 1 or grid.size < 2:
            raise ValueError('need at least two candidate weights')
        if not np.all(grid > 0) or not np.all(np.isfinite(grid)):
            raise ValueError('candidate weights must be positive and finite')
        if not np.all(np.diff(grid) > 0):
            raise ValueError('candidate weights must be strictly increasing')
        grid.setflags(write=False)
        object.__setattr__(self, 'grid', grid)
        if self.method == 'discrepancy':
            if self.noise_level is None or not (self.noise_level >= 0):
                raise ValueError(
                    'the discrepancy principle needs noise_level >= 0'
                )


@dataclass(frozen=True)
class SelectionResult:
    """Chosen weight plus the full search trace."""

    method: str
    lambda_opt: float
    index: int
    lambdas: np.ndarray
    rss: np.ndarray
    penalty: np.ndarray
    scores: Optional[np.ndarray] = None
    edf: Optional[np.ndarray] = None


class _SweepWorkspace:
    """Shared pieces for evaluating many penalty weights on one problem."""

    def __init__(self, problem, grid, alpha):
        self.problem = problem
        self.grid = grid
        self.alpha = float(alpha)
        self.coll, self.gram, self.rhs = _collocation_parts(problem, grid, alpha)
        op = PenaltyOperator(self.alpha, grid.h, grid.n)
        self.op = op
        self.pgram = _penalty_gram(op, grid.n_basis)
        self.gram_dense = SymmetricBanded(self.gram).toarray()

    def factor(self, lam):
        ab = self.gram.copy()
        ab[:self.op.row_bandwidth] += lam * self.pgram
        factor, fail = _backend.banded_cholesky_factor(ab)
        if fail >= 0:
            from .errors import SingularSystemError

            raise SingularSystemError(fail)
        return factor

    def solve_stats(self, lam, with_edf):
        """(coef, rss, penalty_norm2, edf_or_None) at one weight."""
        factor = self.factor(lam)
        coef = _backend.banded_cholesky_solve(factor, self.rhs)
        resid = self.problem.values - self.coll.matvec(coef)
        rss = float(np.dot(self.problem.weights * resid, resid))
        dcoef = self.op.apply_to_sequence(coef)
        pen = float(np.dot(dcoef, dcoef))
        edf = None
        if with_edf:
            influence = _backend.banded_cholesky_solve(factor, self.gram_dense)
            edf = float(np.trace(influence))
        return coef, rss, pen, edf


def effective_df(problem, grid, alpha, lam):
    """Trace of the influence matrix ``(B^T W B + lam D^T D)^{-1} B^T W B``.

    Equals the trace of the data-space hat matrix; computed with banded
    solves only.
    """
    ws = _SweepWorkspace(problem, grid, alpha)
    return ws.solve_stats(float(lam), with_edf=True)[3]


def gcv_score(problem, grid, alpha, lam):
    """Generalized cross-validation score ``m * RSS / (m - edf)**2``.

    Raises
    ------
    DegenerateDFError
        When ``edf >= m``: the denominator vanishes and the score is
        meaningless (too many knots for the data at this weight).
    """
    ws = _SweepWorkspace(problem, grid, alpha)
    _, rss, _, edf = ws.solve_stats(float(lam), with_edf=True)
    return _gcv_from_stats(problem.m, rss, edf)


def _gcv_from_stats(m, rss, edf):
    denom = m - edf
    if not denom > 0:
        raise DegenerateDFError(
            f'effective degrees of freedom {edf!r} >= number of sites {m}'
        )
    return m * rss / denom ** 2


def _menger_curvature(p1, p2, p3):
    """Curvature of the circle through three points (0 for collinear)."""
    (x1, y1), (x2, y2), (x3, y3) = p1, p2, p3
    area2 = (x2 - x1) * (y3 - y1) - (y2 - y1) * (x3 - x1)
    d12 = math.hypot(x2 - x1, y2 - y1)
    d23 = math.hypot(x3 - x2, y3 - y2)
    d13 = math.hypot(x3 - x1, y3 - y1)
    if d12 == 0.0 or d23 == 0.0 or d13 == 0.0:
        return 0.0
    return 2.0 * abs(area2) / (d12 * d23 * d13)


def select_lambda(problem, grid, alpha, spec):
    """Pick a penalty weight for ``(problem, grid, alpha)`` per ``spec``.

    GCV minimizes the cross-validation score; ties within ``TIE_REL`` go to
    the smaller weight. The L-curve picks the point of maximum curvature of
    ``(log RSS, log |D a|^2)`` over interior grid points. The discrepancy
    principle returns the smallest weight whose RSS reaches
    ``m * noise_level**2``, refined by bisection inside the bracketing grid
    cell.

    Returns
    -------
    SelectionResult
    """
    ws = _SweepWorkspace(problem, grid, alpha)
    lams = spec.grid
    with_edf = spec.method == 'gcv'
    rss = np.empty(lams.size)
    pen = np.empty(lams.size)
    edf = np.empty(lams.size) if with_edf else None
    for i, lam in enumerate(lams):
        _, rss[i], pen[i], e = ws.solve_stats(float(lam), with_edf)
        if with_edf:
            edf[i] = e

    if spec.method == 'gcv':
        scores = np.array(
            [_gcv_from_stats(problem.m, r, e) for r, e in zip(rss, edf)]
        )
        best = scores.min()
        idx = int(np.nonzero(scores <= best * (1.0 + TIE_REL))[0][0])
        return SelectionResult(
            'gcv', float(lams[idx]), idx, lams, rss, pen, scores, edf
        )

    if spec.method == 'lcurve':
        # Floors keep an exact interpolant (RSS = 0) or a fully smoothed
        # curve (|Da|^2 = 0) on the log plot instead of producing -inf.
        lx = np.log(np.maximum(rss, 1e-300))
        ly = np.log(np.maximum(pen, 1e-300))
        curv = np.zeros(lams.size)
        for i in range(1, lams.size - 1):
            curv[i] = _menger_curvature(
                (lx[i - 1], ly[i - 1]), (lx[i], ly[i]), (lx[i + 1], ly[i + 1])
            )
        idx = 1
        for i in range(2, lams.size - 1):
            if curv[i] > curv[idx]:
                idx = i
        return SelectionResult(
            'lcurve', float(lams[idx]), idx, lams, rss, pen, curv
        )

    # discrepancy
    sigma = float(spec.noise_level)
    target = problem.m * sigma * sigma
    reached = np.nonzero(rss >= target)[0]
    if reached.size == 0:
        raise DiscrepancyRangeError(float(rss.min()), float(rss.max()), target)
    k = int(reached[0])
    if k == 0:
        lam_opt = float(lams[0])
    else:
        lam_opt = _bisect_discrepancy(ws, float(lams[k - 1]), float(lams[k]), target)
    return SelectionResult('discrepancy', lam_opt, k, lams, rss, pen)


def _bisect_discrepancy(ws, lo, hi, target):
    """Smallest weight in ``[lo, hi]`` with ``RSS >= target`` (log bisection).

    ``lo`` starts below the target and ``hi`` at or above it; RSS is
    nondecreasing in the weight, so the bracket stays valid.
    """
    llo, lhi = math.log(lo), math.log(hi)
    for _ in range(200):
        if lhi - llo <= 1e-10:
            break
        mid = 0.5 * (llo + lhi)
        _, rss, _, _ = ws.solve_stats(math.exp(mid), with_edf=False)
        if rss >= target:
            lhi = mid
        else:
            llo = mid
    return math.exp(lhi)
