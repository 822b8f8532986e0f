"""Second-order exponential difference penalty.

The operator maps ``u(x)`` to ``u(x) - 2*exp(-alpha*h)*u(x - h) +
exp(-2*alpha*h)*u(x - 2h)``: a discrete annihilator whose kernel is spanned
by ``exp(-alpha*x)`` and ``x*exp(-alpha*x)`` on any grid of step ``h``. At
``alpha = 0`` it is the classical second difference. Applied to basis
coefficients it yields the ``n x (n+2)`` banded matrix used as roughness
penalty in the fit.
"""

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PenaltyOperator:
    """Exponential second difference on a uniform grid.

    Parameters
    ----------
    alpha : float
        Frequency; the damped family ``exp(-alpha*x)``, ``x*exp(-alpha*x)``
        is annihilated exactly.
    h : float
        Grid step.
    n : int
        Number of difference rows; acts on sequences of length ``n + 2``.
    """

    alpha: float
    h: float
    n: int

    #: Nonzeros per row.
    row_bandwidth = 3

    def __post_init__(self):
        if not math.isfinite(self.alpha):
            raise ValueError(f'frequency must be finite, got {self.alpha!r}')
        if not (self.h > 0) or not math.isfinite(self.h):
            raise ValueError(f'step must be positive and finite, got {self.h!r}')
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f'need at least one difference row, got {self.n!r}')
        if abs(self.alpha * self.h) > 350.0:
            raise ValueError(
                f'|alpha*h| = {abs(self.alpha * self.h)!r} would overflow the '
                'difference weights; rescale the problem'
            )
        object.__setattr__(self, 'n', int(self.n))

    @property
    def stencil(self):
        """Row coefficients ``(exp(-2ah), -2*exp(-ah), 1)`` in column order.

        Row ``r`` of the matrix places these in columns ``r, r+1, r+2``.
        """
        e1 = math.exp(-self.alpha * self.h)
        return (e1 * e1, -2.0 * e1, 1.0)

    def apply_to_sequence(self, seq):
        """Apply the difference to a coefficient sequence of length ``n + 2``.

        Returns the length-``n`` vector with entries
        ``exp(-2ah)*seq[r] - 2*exp(-ah)*seq[r+1] + seq[r+2]``, accumulated in
        ascending column order so it agrees bitwise with a row-by-row dot
        product against :meth:`build_matrix`.
        """
        seq = np.asarray(seq, dtype=np.float64)
        if seq.shape != (self.n + 2,):
            raise ValueError(
                f'expected a sequence of length {self.n + 2}, got {seq.shape}'
            )
        c0, c1, c2 = self.stencil
        return (c0 * seq[:-2] + c1 * seq[1:-1]) + c2 * seq[2:]

    def apply_to_function(self, func, x):
        """Difference of a callable: ``D[u](x)`` at scalar or array ``x``."""
        x = np.asarray(x, dtype=np.float64)
        c0, c1, _ = self.stencil
        return func(x) + c1 * func(x - self.h) + c0 * func(x - 2.0 * self.h)

    def build_matrix(self):
        """Dense ``(n, n+2)`` difference matrix (three nonzeros per row)."""
        c0, c1, c2 = self.stencil
        out = np.zeros((self.n, self.n + 2))
        rows = np.arange(self.n)
        out[rows, rows] = c0
        out[rows, rows + 1] = c1
        out[rows, rows + 2] = c2
        return out

    def nullspace_basis(self):
        """Columns spanning the exact kernel of :meth:`apply_to_sequence`.

        The sequences ``exp(-alpha*j*h)`` and ``j*exp(-alpha*j*h)`` for
        ``j = 0 .. n+1``.
        """
        j = np.arange(self.n + 2, dtype=np.float64)
        w = np.exp(-self.alpha * self.h * j)
        return np.column_stack([w, j * w])
