"""Timings for the compiled kernels against the NumPy fallback.

Both backend modules are imported directly, so the comparison runs in a
single process regardless of which backend the package selected at import.

Run from the repository root after an editable install:

    python3 benchmarks/bench_backends.py
"""

import argparse
import time

import numpy as np

from hpsplines import _kernels_py
from hpsplines.basis import build_hb_spline

try:
    from hpsplines import _kernels as _kernels_c
except ImportError:
    _kernels_c = None


def best_of(fn, repeats, inner):
    best = float('inf')
    for _ in range(repeats):
        start = time.perf_counter()
        for _ in range(inner):
            fn()
        best = min(best, (time.perf_counter() - start) / inner)
    return best


def bench_eval(backend, parts, xs, repeats):
    inner = max(1, int(2e5 / xs.size))
    return best_of(lambda: backend.eval_piecewise(*parts, xs), repeats, inner)


def bench_cholesky(backend, ab, rhs, repeats):
    def run():
        L, fail = backend.banded_cholesky_factor(ab)
        if fail != -1:
            raise AssertionError('benchmark system must be positive definite')
        backend.banded_cholesky_solve(L, rhs)

    inner = max(1, int(2e4 / ab.shape[1]))
    return best_of(run, repeats, inner)


def spd_band(n, bandwidth, rng):
    ab = np.zeros((bandwidth + 1, n))
    ab[0] = rng.uniform(2.5, 4.0, n)
    for d in range(1, bandwidth + 1):
        ab[d, :n - d] = rng.uniform(-0.4, 0.4, n - d)
    return ab


def report(label, size, t_py, t_c):
    if t_c is None:
        print(f'{label:28s} {size:>8d}  python {t_py * 1e6:10.2f} us  compiled     (unavailable)')
    else:
        print(
            f'{label:28s} {size:>8d}  python {t_py * 1e6:10.2f} us  '
            f'compiled {t_c * 1e6:10.2f} us  speedup {t_py / t_c:6.2f}x'
        )


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument('--repeats', type=int, default=5,
                        help='timing repetitions per case (best is kept)')
    args = parser.parse_args()

    if _kernels_c is None:
        print('compiled extension not built; timing the fallback only')

    rng = np.random.default_rng(7)
    parts = build_hb_spline(1.3, 0.25)._flat

    print('piecewise evaluation (points per call):')
    for size in (100, 1000, 10000, 100000):
        xs = rng.uniform(-0.25, 1.25, size)
        t_py = bench_eval(_kernels_py, parts, xs, args.repeats)
        t_c = None if _kernels_c is None else bench_eval(_kernels_c, parts, xs, args.repeats)
        report('eval_piecewise', size, t_py, t_c)

    print()
    print('banded Cholesky factor + solve (matrix order, bandwidth 3):')
    for n in (15, 50, 200, 1000):
        ab = spd_band(n, 3, rng)
        rhs = rng.standard_normal(n)
        t_py = bench_cholesky(_kernels_py, ab, rhs, args.repeats)
        t_c = None if _kernels_c is None else bench_cholesky(_kernels_c, ab, rhs, args.repeats)
        report('cholesky_factor_solve', n, t_py, t_c)


if __name__ == '__main__':
    main()
