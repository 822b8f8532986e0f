"""End-to-end acceptance checks.

Ten independent criteria, each printed as a single PASS/FAIL line (run with
``pytest -s`` to see them). Expected values come from the stated references:
numerical quadrature of the defining integrals, dense LAPACK re-solves,
unstructured least squares, or exact closed forms derived by hand.
"""

import json
import os
import time

import numpy as np
import pytest

from hpsplines.basis import HBBasis, build_hb_spline, build_knot_grid
from hpsplines.cli import main as cli_main
from hpsplines.fitting import (
    FitProblem,
    exponential_moments,
    fit,
    relative_residual,
    solve_spd_banded,
    assemble_system,
)
from hpsplines.oracles import dense_solve_reference, quadrature_convolution_eval_many
from hpsplines.penalty import PenaltyOperator
from hpsplines.rng import GaussianStream
from hpsplines.selection import LambdaSearchSpec, effective_df, select_lambda

ALPHAS = (-2.0, -1.0, -0.1, 0.0, 0.1, 1.0, 2.0)
STEPS = (0.1, 1.0)


def _report(name, passed, detail):
    print(f'{"PASS" if passed else "FAIL"}  {name}: {detail}')
    return passed


def _noisy_panel_fixture():
    """The demo's figure-1 panel-2 data: exp(-x) plus sigma = 0.005 noise.

    Same stream arithmetic as the demo command at its default seed, so the
    moment numbers here and in the regenerated reports describe one dataset.
    """
    x = np.linspace(0.0, 1.0, 50)
    stream = GaussianStream(20240101 * 100 + 1 * 10 + 2)
    y = np.exp(-x) + 0.005 * np.asarray(stream.normals(50))
    return x, y


def test_criterion_01_basis_against_quadrature():
    rng = np.random.default_rng(11001)
    start = time.perf_counter()
    worst = 0.0
    for alpha in ALPHAS:
        for h in STEPS:
            xs = rng.uniform(-0.5 * h, 4.5 * h, 100)
            exact = build_hb_spline(alpha, h)(xs)
            reference = quadrature_convolution_eval_many(alpha, h, xs)
            worst = max(worst, float(np.abs(exact - reference).max()))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-8 and elapsed <= 30.0
    assert _report(
        'criterion 1 basis vs quadrature',
        ok,
        f'max abs err {worst:.3e} (tol 1e-08), {elapsed:.2f}s (limit 30s)',
    )


def test_criterion_02_cubic_degeneration():
    values = build_hb_spline(0.0, 1.0)(np.arange(5.0))
    expect = np.array([0.0, 1 / 6, 2 / 3, 1 / 6, 0.0])
    worst = float(np.abs(values - expect).max())
    assert _report(
        'criterion 2 cubic degeneration',
        worst <= 1e-12,
        f'max abs deviation {worst:.3e} (tol 1e-12)',
    )


def test_criterion_03_exponential_reproduction():
    x = np.linspace(0.0, 1.0, 50)
    start = time.perf_counter()
    worst = 0.0
    for target in (np.exp(-x), x * np.exp(-x)):
        for lam in (0.1, 1.0, 100.0):
            model = fit(FitProblem(x, target), alpha=1.0, lam=lam, n=13)
            worst = max(worst, relative_residual(target, model.predict(x)))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-7 and elapsed <= 1.0
    assert _report(
        'criterion 3 exponential reproduction',
        ok,
        f'max rel residual {worst:.3e} (tol 1e-07), {elapsed:.3f}s (limit 1s)',
    )


def test_criterion_04_moment_conservation():
    x, y = _noisy_panel_fixture()
    worst = 0.0
    for alpha in (1.0, 0.0):
        model = fit(FitProblem(x, y), alpha=alpha, lam=1.0, n=13)
        data_m = exponential_moments(x, y, alpha)
        fit_m = exponential_moments(x, model.predict(x), alpha)
        for dm, fm in zip(data_m, fit_m):
            worst = max(worst, abs(fm - dm) / abs(dm))
    assert _report(
        'criterion 4 moment conservation',
        worst <= 1e-8,
        f'max rel discrepancy {worst:.3e} (tol 1e-08), alpha in {{1, 0}}',
    )


def test_criterion_05_penalty_asymmetry():
    x = np.linspace(0.0, 1.0, 50)
    y = np.exp(x)
    loose = relative_residual(
        y, fit(FitProblem(x, y), alpha=1.0, lam=0.0, n=13).predict(x)
    )
    heavy = relative_residual(
        y, fit(FitProblem(x, y), alpha=1.0, lam=1e3, n=13).predict(x)
    )
    ok = loose <= 1e-7 and heavy >= 1e-3
    assert _report(
        'criterion 5 penalty asymmetry',
        ok,
        f'growing family: residual {loose:.3e} at lam=0 (tol 1e-07), '
        f'{heavy:.3e} at lam=1e3 (floor 1e-03)',
    )


def test_criterion_06_annihilation_identities():
    # "relative" means relative to the largest term entering the cancelling
    # sum; that is the quantity the identity drives to zero
    rng = np.random.default_rng(11006)
    worst = 0.0
    for _ in range(100):
        alpha = rng.uniform(-2.0, 2.0)
        h = rng.uniform(0.05, 1.5)
        x = float(rng.uniform(-1.0, 3.0))
        n = int(rng.integers(2, 12))
        op = PenaltyOperator(alpha, h, n)
        c0, c1, _ = op.stencil

        # function form at a random point
        for linear in (False, True):
            def func(t, lin=linear):
                base = np.exp(-alpha * t)
                return t * base if lin else base

            out = float(op.apply_to_function(func, np.asarray(x)))
            scale = max(
                abs(float(func(x))),
                abs(c1 * float(func(x - h))),
                abs(c0 * float(func(x - 2.0 * h))),
                1e-300,
            )
            worst = max(worst, abs(out) / scale)

        # matrix form on the two nullspace coefficient sequences
        null = op.nullspace_basis()
        for col in range(2):
            seq = null[:, col]
            out = op.apply_to_sequence(seq)
            for r in range(n):
                scale = max(
                    abs(c0 * seq[r]), abs(c1 * seq[r + 1]), abs(seq[r + 2]),
                    1e-300,
                )
                worst = max(worst, abs(out[r]) / scale)
    assert _report(
        'criterion 6 annihilation identities',
        worst <= 1e-12,
        f'max rel output {worst:.3e} over 100 random (alpha, h, x) (tol 1e-12)',
    )


def test_criterion_07_alpha_to_zero_continuity():
    x, y = _noisy_panel_fixture()
    problem = FitProblem(x, y)
    tiny = fit(problem, alpha=1e-6, lam=1.0, n=13).predict(x)
    zero = fit(problem, alpha=0.0, lam=1.0, n=13).predict(x)
    gap = float(np.abs(tiny - zero).max())
    assert _report(
        'criterion 7 alpha to zero continuity',
        gap <= 1e-5,
        f'sup gap at sites {gap:.3e} (tol 1e-05)',
    )


def test_criterion_08_banded_dense_equivalence():
    rng = np.random.default_rng(11008)
    worst_coef = 0.0
    worst_edf = 0.0
    for _ in range(20):
        m = int(rng.integers(30, 201))
        n = int(rng.integers(4, 41))
        lam = float(10.0 ** rng.uniform(-4.0, 4.0))
        alpha = float(rng.uniform(-2.0, 2.0))
        x = np.sort(rng.uniform(0.0, 3.0, m))
        x += np.linspace(0.0, 1e-9, m)  # enforce strict ordering
        y = np.sin(2.5 * x) + rng.standard_normal(m) * 0.1
        w = rng.uniform(0.5, 2.0, m)
        problem = FitProblem(x, y, w)
        grid = build_knot_grid(x[0], x[-1], n)

        system, rhs = assemble_system(problem, grid, alpha, lam)
        coef = solve_spd_banded(system, rhs)
        ref = dense_solve_reference(problem, grid, alpha, lam)
        scale = float(np.abs(ref.coefficients).max())
        worst_coef = max(
            worst_coef, float(np.abs(coef - ref.coefficients).max()) / scale
        )
        worst_edf = max(
            worst_edf, abs(effective_df(problem, grid, alpha, lam) - ref.edf)
        )
    ok = worst_coef <= 1e-10 and worst_edf <= 1e-9
    assert _report(
        'criterion 8 banded vs dense',
        ok,
        f'coef rel {worst_coef:.3e} (tol 1e-10), edf abs {worst_edf:.3e} '
        f'(tol 1e-09) over 20 problems',
    )


def test_criterion_09_figure_regeneration(tmp_path):
    out1 = tmp_path / 'run1'
    out2 = tmp_path / 'run2'
    assert cli_main(['demo', '--outdir', str(out1), '--seed', '20240101']) == 0
    assert cli_main(['demo', '--outdir', str(out2), '--seed', '20240101']) == 0

    names = sorted(os.listdir(out1))
    expected_panels = [(f, p) for f in (1, 2) for p in (1, 2, 3)]
    complete = all(
        f'fig{f}_panel{p}_{kind}.csv' in names
        for f, p in expected_panels
        for kind in ('data', 'hp', 'classical', 'true')
    )

    worst_clean = 0.0
    worst_moment = 0.0
    for f, p in expected_panels:
        report = json.loads((out1 / f'fig{f}_panel{p}_report.json').read_text())
        worst_moment = max(worst_moment, max(report['moment_errors']))
        if report['noise_level'] == 0.0:
            worst_clean = max(worst_clean, report['max_abs_residual'])

    identical = all(
        (out1 / name).read_bytes() == (out2 / name).read_bytes() for name in names
    )
    ok = complete and worst_clean <= 1e-7 and worst_moment <= 1e-8 and identical
    assert _report(
        'criterion 9 figure regeneration',
        ok,
        f'six panels complete={complete}, noise-free max residual '
        f'{worst_clean:.3e} (tol 1e-07), moment errors {worst_moment:.3e} '
        f'(tol 1e-08), byte-identical rerun={identical}',
    )


def test_criterion_10_selection_oracles():
    x, y = _noisy_panel_fixture()
    problem = FitProblem(x, y)
    grid = build_knot_grid(0.0, 1.0, 13)
    spec = LambdaSearchSpec(method='gcv')
    result = select_lambda(problem, grid, 1.0, spec)

    dense_scores = np.array([
        dense_solve_reference(problem, grid, 1.0, lam).gcv for lam in spec.grid
    ])
    same_argmin = int(np.argmin(dense_scores)) == result.index
    score_rel = float(
        (np.abs(result.scores - dense_scores) / np.abs(dense_scores)).max()
    )

    dspec = LambdaSearchSpec(method='discrepancy', noise_level=0.0)
    dresult = select_lambda(problem, grid, 1.0, dspec)
    zero_noise_ok = dresult.lambda_opt == dspec.grid[0]

    ok = same_argmin and score_rel <= 1e-8 and zero_noise_ok
    assert _report(
        'criterion 10 selection oracles',
        ok,
        f'gcv argmin match={same_argmin}, score rel {score_rel:.3e} '
        f'(tol 1e-08), sigma=0 picks smallest lambda={zero_noise_ok}',
    )
