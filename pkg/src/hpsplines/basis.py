"""Exponential B-spline basis on a uniform knot grid.

The order-4 bump is built by convolving four first-order exponential kernels
with frequencies ``(beta, beta, -beta, -beta)`` on the unit grid and dilating
the result to step ``h`` with ``beta = alpha * h``, so in data coordinates
the basis spans products of ``{1, x}`` with ``exp(alpha*x)`` and
``exp(-alpha*x)``. At ``alpha = 0`` it degenerates to the cardinal cubic
B-spline. Each basis function is a translate of a single bump, and at most
four of them are nonzero at any point, which keeps all linear algebra banded.
"""

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DomainError, ReproductionCheckError
from .piecewise import convolve, first_order_kernel

# Below this unit-grid frequency the exponential basis is numerically
# indistinguishable from the polynomial one, so the bump is built with
# beta = 0 to avoid cancellation in nearly-resonant convolution integrals.
SMALL_FREQUENCY = 1e-6

#: Number of basis functions overlapping any point (order of the spline).
BUMP_SUPPORT_STEPS = 4


def build_hb_spline(alpha, h):
    """Order-4 exponential B-spline bump for frequency ``alpha`` and step ``h``.

    Parameters
    ----------
    alpha : float
        Frequency of the exponential family to reproduce; the bump is a
        piecewise combination of ``x**p * exp(+/- alpha * x)`` with p <= 1
        (p <= 3 when ``alpha`` is treated as zero).
    h : float
        Knot spacing; the support is ``[0, 4*h]``.

    Returns
    -------
    PiecewiseExpo
        ``C^2`` bump, positive on ``(0, 4*h)``, zero outside.
    """
    alpha = float(alpha)
    h = float(h)
    if not math.isfinite(alpha):
        raise ValueError(f'frequency must be finite, got {alpha!r}')
    if not (h > 0) or not math.isfinite(h):
        raise ValueError(f'step must be positive and finite, got {h!r}')
    beta = alpha * h
    if abs(beta) <= SMALL_FREQUENCY:
        beta = 0.0
    plus = first_order_kernel(beta)
    minus = first_order_kernel(-beta)
    unit = convolve(convolve(plus, plus), convolve(minus, minus))
    return unit.dilated(h)


@dataclass(frozen=True)
class KnotGrid:
    """Uniform knot grid on ``[a, b]`` with ``n`` interior knots.

    The interior knots are ``xi_1 = a, ..., xi_n = b`` with spacing
    ``h = (b - a) / (n - 1)``; three phantom knots extend the grid on each
    side so that every basis function whose support meets ``[a, b]`` has a
    full set of knots. There are ``n + 2`` such basis functions.
    """

    a: float
    b: float
    n: int

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise ValueError('interval endpoints must be finite')
        if not self.b > self.a:
            raise ValueError(f'need b > a, got [{self.a!r}, {self.b!r}]')
        if int(self.n) != self.n or self.n < 4:
            raise ValueError(f'need at least 4 knots, got {self.n!r}')
        object.__setattr__(self, 'n', int(self.n))

    @property
    def h(self):
        return (self.b - self.a) / (self.n - 1)

    @property
    def n_basis(self):
        """Number of basis functions active on ``[a, b]``."""
        return self.n + 2

    @cached_property
    def knots(self):
        """All knots including phantoms, ``xi_{-2} ... xi_{n+3}``."""
        idx = np.arange(-2, self.n + 4, dtype=np.float64)
        out = self.a + (idx - 1.0) * self.h
        out.setflags(write=False)
        return out

    @cached_property
    def offsets(self):
        """Left support endpoints ``t_j = a + (j - 3) h`` of the basis bumps."""
        out = self.a + (np.arange(self.n_basis, dtype=np.float64) - 3.0) * self.h
        out.setflags(write=False)
        return out

    def contains(self, x):
        x = np.asarray(x, dtype=np.float64)
        return bool(np.all(x >= self.a) and np.all(x <= self.b))


def build_knot_grid(a, b, n):
    """Validated :class:`KnotGrid` on ``[a, b]`` with ``n`` interior knots."""
    return KnotGrid(float(a), float(b), int(n))


@dataclass(frozen=True)
class BandedCollocation:
    """Design matrix rows in banded form.

    Row ``i`` has its nonzeros in columns ``first_col[i] .. first_col[i]+3``
    with the values in ``values[i, :]``; every other entry is zero.
    """

    first_col: np.ndarray
    values: np.ndarray
    n_cols: int

    #: Maximum nonzeros per row (the spline order).
    row_bandwidth = BUMP_SUPPORT_STEPS

    @property
    def shape(self):
        return (self.values.shape[0], self.n_cols)

    def matvec(self, coef):
        """Row-wise dot with a coefficient vector of length ``n_cols``."""
        coef = np.asarray(coef, dtype=np.float64)
        if coef.shape != (self.n_cols,):
            raise ValueError(f'expected {self.n_cols} coefficients, got {coef.shape}')
        cols = self.first_col[:, None] + np.arange(self.row_bandwidth)
        return np.einsum('ij,ij->i', self.values, coef[cols])

    def toarray(self):
        """Dense ``(m, n_cols)`` matrix; intended for small reference checks."""
        m = self.values.shape[0]
        out = np.zeros((m, self.n_cols))
        cols = self.first_col[:, None] + np.arange(self.row_bandwidth)
        np.put_along_axis(out, cols, self.values, axis=1)
        return out


class HBBasis:
    """The full basis: one bump translated to every grid offset.

    Basis function ``j`` (0-based, ``j = 0 .. n+1``) is
    ``B_j(x) = bump(x - t_j)`` with ``t_j = a + (j - 3) h``; exactly the
    functions whose support intersects ``[a, b]``.
    """

    def __init__(self, grid, alpha):
        self.grid = grid
        self.alpha = float(alpha)
        self.bump = build_hb_spline(self.alpha, grid.h)

    @property
    def n_basis(self):
        return self.grid.n_basis

    def window_columns(self, x):
        """First active column index for each point of ``x``.

        Columns ``j0 .. j0+3`` cover every basis function that can be nonzero
        at the point; at grid points one or two window entries evaluate to
        zero, which is harmless.
        """
        g = self.grid
        u = (np.asarray(x, dtype=np.float64) - g.a) / g.h
        return np.clip(np.floor(u).astype(np.int64), 0, g.n - 2)

    def collocation(self, x):
        """Banded design matrix at the sites ``x`` (must lie in ``[a, b]``).

        Raises
        ------
        DomainError
            If any site falls outside the grid interval.
        """
        x = np.ascontiguousarray(x, dtype=np.float64)
        if x.ndim != 1:
            raise ValueError('sites must be a 1-d array')
        g = self.grid
        if x.size and (x.min() < g.a or x.max() > g.b):
            bad = float(x[(x < g.a) | (x > g.b)][0])
            raise DomainError(
                f'site {bad!r} outside the grid interval [{g.a!r}, {g.b!r}]'
            )
        j0 = self.window_columns(x)
        cols = j0[:, None] + np.arange(BUMP_SUPPORT_STEPS)
        values = self.bump(x[:, None] - g.offsets[cols])
        return BandedCollocation(j0, values, self.n_basis)

    def evaluate_combination(self, coef, x):
        """Evaluate ``sum_j coef[j] * B_j`` at the sites ``x``."""
        return self.collocation(x).matvec(coef)


def collocation_matrix(grid, alpha, sites):
    """Banded design matrix of the basis for ``(grid, alpha)`` at ``sites``."""
    return HBBasis(grid, alpha).collocation(np.asarray(sites, dtype=np.float64))


def reproduction_coefficients(grid, alpha, sign=1, times_x=False):
    """Coefficients writing ``x**d * exp(sign*alpha*x)`` in the basis.

    For ``times_x=False`` the target is ``exp(sign*alpha*x)`` and the
    coefficients have the form ``c_j = g0 * exp(sign*alpha*t_j)``; for
    ``times_x=True`` the target is ``x * exp(sign*alpha*x)`` and
    ``c_j = (g0 + g1*t_j) * exp(sign*alpha*t_j)``. The scalars are fixed by
    matching the target at one or two interior points, then certified on a
    200-point grid.

    Parameters
    ----------
    grid : KnotGrid
    alpha : float
        Basis frequency.
    sign : {1, -1}
        Sign of the exponent in the target.
    times_x : bool
        Include the linear factor.

    Returns
    -------
    numpy.ndarray, shape (n+2,)

    Raises
    ------
    ReproductionCheckError
        If the certified residual exceeds ``1e-9``; the target is then not
        representable at that accuracy (wrong sign convention, ill
        conditioning, or a frequency the basis does not carry).
    """
    if sign not in (1, -1):
        raise ValueError(f'sign must be +1 or -1, got {sign!r}')
    basis = HBBasis(grid, alpha)
    t = grid.offsets
    rate = sign * basis.alpha
    weights = np.exp(rate * t)

    span = grid.b - grid.a
    checks = grid.a + span * (np.array([0.37, 0.63]) if times_x else np.array([0.37]))
    rows = collocation_matrix(grid, alpha, checks)

    def target(x):
        out = np.exp(rate * x)
        return x * out if times_x else out

    if times_x:
        design = np.column_stack([
            rows.matvec(weights),
            rows.matvec(weights * t),
        ])
        gamma = np.linalg.solve(design, target(checks))
        coef = weights * (gamma[0] + gamma[1] * t)
    else:
        base = rows.matvec(weights)
        coef = (target(checks)[0] / base[0]) * weights

    cert = np.linspace(grid.a, grid.b, 200)
    resid = basis.evaluate_combination(coef, cert) - target(cert)
    worst = float(np.abs(resid).max())
    if worst > 1e-9:
        raise ReproductionCheckError(
            f'certified reproduction residual {worst:.3e} exceeds 1e-09 for '
            f'target x**{int(times_x)} * exp({rate!r} * x)'
        )
    return coef
