"""Independent reference computations used to cross-check the fast paths.

Nothing here shares numerics with the modules it checks: basis values are
reproduced by adaptive numerical quadrature of the defining convolution
integrals instead of the closed-form piece algebra, linear systems are
re-solved densely with LAPACK instead of the banded Cholesky, and
reproduction coefficients are re-derived by unstructured least squares
instead of the two-parameter closed form.
"""

from dataclasses import dataclass

import numpy as np

from .basis import HBBasis
from .errors import QuadratureAccuracyError, ReproductionCheckError
from .penalty import PenaltyOperator


@dataclass(frozen=True)
class QuadratureSpec:
    """Accuracy targets for the quadrature reference.

    ``tol`` is the absolute error budget per integral; panels subdivide
    until the classic Richardson estimate passes, or fail loudly at
    ``max_depth``.
    """

    tol: float = 1e-10
    max_depth: int = 40


def _simpson_batched(func, owner, a, b, n_owners, tol_total, max_depth):
    """Adaptive Simpson over a batch of panels, vectorized as a worklist.

    ``owner[k]`` says which integral panel ``k`` belongs to; ``func(t, own)``
    must evaluate the integrand of integral ``own[j]`` at ``t[j]``
    elementwise. Each integral gets the absolute budget ``tol_total``,
    distributed over its panels by length. A panel is accepted when the
    two-half refinement agrees with the single-panel rule to ``15 * budget``
    and contributes its Richardson-extrapolated value.
    """
    owner = np.asarray(owner, dtype=np.int64)
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    acc = np.zeros(n_owners)
    keep = b - a > 0
    owner, a, b = owner[keep], a[keep], b[keep]
    if owner.size == 0:
        return acc
    length = np.zeros(n_owners)
    np.add.at(length, owner, b - a)
    tolp = tol_total * (b - a) / length[owner]
    mid = 0.5 * (a + b)
    fa, fm, fb = func(a, owner), func(mid, owner), func(b, owner)
    est = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    depth = np.zeros(owner.size, dtype=np.int64)
    while owner.size:
        lm = 0.5 * (a + mid)
        rm = 0.5 * (mid + b)
        flm, frm = func(lm, owner), func(rm, owner)
        left = (mid - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - mid) / 6.0 * (fm + 4.0 * frm + fb)
        refined = left + right
        err = refined - est
        done = np.abs(err) <= 15.0 * tolp
        stuck = ~done & (depth >= max_depth)
        if stuck.any():
            j = int(np.nonzero(stuck)[0][0])
            raise QuadratureAccuracyError(
                f'panel [{a[j]!r}, {b[j]!r}] of integral {owner[j]} did not '
                f'converge within depth {max_depth}'
            )
        np.add.at(acc, owner[done], refined[done] + err[done] / 15.0)
        s = ~done
        owner = np.concatenate([owner[s], owner[s]])
        a, mid, b, fa, fm, fb, est, tolp, depth = (
            np.concatenate([a[s], mid[s]]),
            np.concatenate([lm[s], rm[s]]),
            np.concatenate([mid[s], b[s]]),
            np.concatenate([fa[s], fm[s]]),
            np.concatenate([flm[s], frm[s]]),
            np.concatenate([fm[s], fb[s]]),
            np.concatenate([left[s], right[s]]),
            np.concatenate([0.5 * tolp[s], 0.5 * tolp[s]]),
            np.concatenate([depth[s] + 1, depth[s] + 1]),
        )
    return acc


def _first_order(beta, u):
    """``exp(beta*u)`` on [0, 1], zero outside."""
    inside = (u >= 0.0) & (u <= 1.0)
    return np.where(inside, np.exp(beta * np.clip(u, 0.0, 1.0)), 0.0)


def _order2_batched(beta, t, spec, tol):
    """Order-2 bump values by quadrature: ``int K(s) K(t - s) ds``."""
    t = np.asarray(t, dtype=np.float64)
    lo = np.maximum(0.0, t - 1.0)
    hi = np.minimum(1.0, t)

    def integrand(s, own):
        return _first_order(beta, s) * _first_order(beta, t[own] - s)

    return _simpson_batched(
        integrand, np.arange(t.size), lo, hi, t.size, tol, spec.max_depth
    )


def quadrature_convolution_eval_many(alpha, h, x, spec=None):
    """Order-4 basis bump values computed by nested adaptive quadrature.

    Evaluates the same function as ``build_hb_spline(alpha, h)`` at the
    points ``x``, but through numerical convolution of the order-2 factors:
    the outer integral runs over panels pre-split at every breakpoint of the
    integrand, and the order-2 factors are themselves quadratures with a
    hundredth of the outer budget, leaving the total within ``spec.tol``.
    """
    if spec is None:
        spec = QuadratureSpec()
    x = np.asarray(x, dtype=np.float64)
    h = float(h)
    if not h > 0:
        raise ValueError(f'step must be positive, got {h!r}')
    beta = float(alpha) * h
    u = x.ravel() / h
    inner_tol = spec.tol * 1e-2
    outer_tol = spec.tol * 0.5

    # Outer integrand: B2_plus(t) * B2_minus(u - t), kinked where either
    # factor crosses a breakpoint.
    def integrand(t, own):
        f = _order2_batched(beta, t, spec, inner_tol)
        g = _order2_batched(-beta, u[own] - t, spec, inner_tol)
        return f * g

    owners, pan_lo, pan_hi = [], [], []
    for i, ui in enumerate(u):
        lo = max(0.0, ui - 2.0)
        hi = min(2.0, ui)
        if hi <= lo:
            continue
        cuts = sorted({lo, hi} | {
            c for c in (0.0, 1.0, 2.0, ui - 2.0, ui - 1.0, ui) if lo < c < hi
        })
        for left, right in zip(cuts[:-1], cuts[1:]):
            owners.append(i)
            pan_lo.append(left)
            pan_hi.append(right)

    vals = _simpson_batched(
        integrand,
        np.asarray(owners, dtype=np.int64),
        np.asarray(pan_lo, dtype=np.float64),
        np.asarray(pan_hi, dtype=np.float64),
        u.size,
        outer_tol,
        spec.max_depth,
    )
    return vals.reshape(x.shape) if x.ndim else float(vals[0])


def quadrature_convolution_eval(alpha, h, x, spec=None):
    """Scalar convenience wrapper around the batched quadrature reference."""
    return float(
        quadrature_convolution_eval_many(alpha, h, np.asarray([x], float), spec)[0]
    )


@dataclass(frozen=True)
class DenseReference:
    """Everything the dense re-solve produces for one problem."""

    matrix: np.ndarray
    coefficients: np.ndarray
    fitted: np.ndarray
    rss: float
    edf: float
    gcv: float


def dense_solve_reference(problem, grid, alpha, lam):
    """Re-solve the penalized normal equations with dense LAPACK routines.

    Builds the full design matrix, forms ``B^T W B + lam * D^T D`` without
    band storage, solves with ``numpy.linalg.solve``, and takes the
    effective degrees of freedom from the explicit hat matrix trace.
    """
    basis = HBBasis(grid, alpha)
    design = basis.collocation(problem.sites).toarray()
    w = problem.weights
    dmat = PenaltyOperator(alpha, grid.h, grid.n).build_matrix()
    matrix = design.T @ (w[:, None] * design) + lam * (dmat.T @ dmat)
    coef = np.linalg.solve(matrix, design.T @ (w * problem.values))
    fitted = design @ coef
    resid = problem.values - fitted
    rss = float(np.dot(w * resid, resid))
    influence = np.linalg.solve(matrix, design.T)
    edf = float(np.einsum('ij,ji->', design * w[:, None], influence))
    m = problem.m
    gcv = m * rss / (m - edf) ** 2
    return DenseReference(matrix, coef, fitted, rss, edf, gcv)


def reproduction_oracle(grid, alpha, sign=1, times_x=False):
    """Reproduction coefficients by unstructured dense least squares.

    Solves for the basis combination closest to ``x**d * exp(sign*alpha*x)``
    on 500 uniform sites with ``numpy.linalg.lstsq``, then certifies the
    result on a separate 200-site grid to ``1e-9``. No exponential ansatz is
    involved, so agreement with the structured construction is meaningful.
    """
    if sign not in (1, -1):
        raise ValueError(f'sign must be +1 or -1, got {sign!r}')
    basis = HBBasis(grid, alpha)
    rate = sign * basis.alpha

    def target(x):
        out = np.exp(rate * x)
        return x * out if times_x else out

    sites = np.linspace(grid.a, grid.b, 500)
    design = basis.collocation(sites).toarray()
    coef, *_ = np.linalg.lstsq(design, target(sites), rcond=None)

    cert = np.linspace(grid.a, grid.b, 200)
    resid = basis.collocation(cert).toarray() @ coef - target(cert)
    worst = float(np.abs(resid).max())
    if worst > 1e-9:
        raise ReproductionCheckError(
            f'least-squares reproduction residual {worst:.3e} exceeds 1e-09 '
            f'for target x**{int(times_x)} * exp({rate!r} * x)'
        )
    return coef
