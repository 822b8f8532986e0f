"""Agreement between the compiled kernels and the NumPy fallback."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from hpsplines import _backend, _kernels_py
from hpsplines.basis import build_hb_spline

compiled = pytest.importorskip(
    'hpsplines._kernels', reason='compiled extension not built'
)


def _flat_bump(alpha, h):
    return build_hb_spline(alpha, h)._flat


def test_backend_module_reports_name():
    assert _backend.BACKEND_NAME in ('compiled', 'python')
    assert _kernels_py.BACKEND_NAME == 'python'
    assert compiled.BACKEND_NAME == 'compiled'


def test_eval_piecewise_agreement():
    rng = np.random.default_rng(61)
    for alpha, h in [(0.0, 1.0), (1.7, 0.3), (-2.2, 0.9)]:
        parts = _flat_bump(alpha, h)
        xs = rng.uniform(-h, 5 * h, 2000)
        a = _kernels_py.eval_piecewise(*parts, xs)
        b = compiled.eval_piecewise(*parts, xs)
        assert_allclose(b, a, rtol=1e-12, atol=5e-15)


def test_eval_piecewise_edge_semantics_match():
    parts = _flat_bump(1.0, 0.5)
    edges = np.array([0.0, 0.5, 1.0, 1.5, 2.0, -1e-300, np.nan, np.inf, -np.inf])
    a = _kernels_py.eval_piecewise(*parts, edges)
    b = compiled.eval_piecewise(*parts, edges)
    assert np.array_equal(a, b)


def test_cholesky_bitwise_agreement():
    rng = np.random.default_rng(62)
    for n, bw in [(10, 1), (25, 3), (40, 2)]:
        ab = np.zeros((bw + 1, n))
        ab[0] = rng.uniform(2.0, 4.0, n)
        for d in range(1, bw + 1):
            ab[d, :n - d] = rng.uniform(-0.4, 0.4, n - d)
        La, fa = _kernels_py.banded_cholesky_factor(ab)
        Lb, fb = compiled.banded_cholesky_factor(ab)
        assert fa == fb == -1
        assert np.array_equal(La, Lb)
        rhs = rng.standard_normal((n, 4))
        assert np.array_equal(
            _kernels_py.banded_cholesky_solve(La, rhs),
            compiled.banded_cholesky_solve(Lb, rhs),
        )
        vec = rng.standard_normal(n)
        xa = _kernels_py.banded_cholesky_solve(La, vec)
        xb = compiled.banded_cholesky_solve(Lb, vec)
        assert xa.shape == xb.shape == (n,)
        assert np.array_equal(xa, xb)


def test_failing_pivot_index_agreement():
    ab = np.zeros((3, 8))
    ab[0] = [2.0, 2.0, 2.0, -1.0, 2.0, 2.0, 2.0, 2.0]
    _, fa = _kernels_py.banded_cholesky_factor(ab)
    _, fb = compiled.banded_cholesky_factor(ab)
    assert fa == fb == 3


def test_pure_python_env_forces_fallback():
    import os
    import subprocess
    import sys

    code = 'import hpsplines; print(hpsplines.BACKEND_NAME)'
    out = subprocess.run(
        [sys.executable, '-c', code],
        env={**os.environ, 'HPSPLINES_PURE_PYTHON': '1'},
        capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == 'python'


def test_full_fit_identical_across_backends():
    import os
    import subprocess
    import sys

    code = (
        'import numpy as np\n'
        'from hpsplines.fitting import FitProblem, fit\n'
        'x = np.linspace(0, 1, 50)\n'
        'rng = np.random.default_rng(5)\n'
        'y = np.exp(-x) + 0.01 * rng.standard_normal(50)\n'
        'model = fit(FitProblem(x, y), 1.0, lam=1.0, n=13)\n'
        'print(repr(model.coefficients.tolist()))\n'
    )
    runs = {}
    for flag in ('0', '1'):
        out = subprocess.run(
            [sys.executable, '-c', code],
            env={**os.environ, 'HPSPLINES_PURE_PYTHON': flag},
            capture_output=True, text=True, check=True,
        )
        runs[flag] = np.asarray(eval(out.stdout))
    assert_allclose(runs['0'], runs['1'], rtol=1e-12, atol=1e-15)
