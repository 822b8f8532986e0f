"""Basis construction: grids, bumps, collocation windows, reproduction."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from hpsplines.basis import (
    HBBasis,
    build_hb_spline,
    build_knot_grid,
    collocation_matrix,
    reproduction_coefficients,
)
from hpsplines.errors import DomainError, ReproductionCheckError


class TestKnotGrid:
    def test_spacing_and_extent(self):
        g = build_knot_grid(0.0, 1.0, 11)
        assert g.h == pytest.approx(0.1)
        assert g.n_basis == 13
        assert g.knots.size == 17
        assert g.knots[3] == pytest.approx(0.0)
        assert g.knots[13] == pytest.approx(1.0)
        assert g.knots[0] == pytest.approx(-0.3)
        assert g.knots[-1] == pytest.approx(1.3)

    def test_offsets_cover_interval(self):
        g = build_knot_grid(-1.0, 3.0, 9)
        t = g.offsets
        assert t.size == g.n_basis
        # every bump [t_j, t_j + 4h] intersects [a, b]
        assert np.all(t < g.b)
        assert np.all(t + 4 * g.h > g.a)

    def test_validation(self):
        with pytest.raises(ValueError):
            build_knot_grid(1.0, 1.0, 5)
        with pytest.raises(ValueError):
            build_knot_grid(0.0, 1.0, 3)
        with pytest.raises(ValueError):
            build_knot_grid(np.inf, 1.0, 5)


class TestBump:
    def test_cubic_degeneration_exact_values(self):
        bump = build_hb_spline(0.0, 1.0)
        assert_allclose(
            bump(np.arange(5.0)), [0.0, 1 / 6, 2 / 3, 1 / 6, 0.0],
            rtol=0, atol=1e-13,
        )

    def test_small_frequency_threshold_uses_cubic(self):
        direct = build_hb_spline(0.0, 1.0)
        tiny = build_hb_spline(5e-7, 1.0)
        xs = np.linspace(0.0, 4.0, 101)
        assert_allclose(tiny(xs), direct(xs), rtol=0, atol=0)

    def test_rates_are_plus_minus_alpha_after_dilation(self):
        alpha, h = 1.3, 0.25
        bump = build_hb_spline(alpha, h)
        rates = {t.rate for piece in bump.pieces for t in piece}
        assert rates == {alpha, -alpha}
        assert bump.support == (0.0, 4 * h)

    def test_positive_inside_support(self):
        bump = build_hb_spline(-1.7, 0.5)
        # Strict positivity away from the edges; at the edges the true value
        # decays cubically to zero, so evaluation there is roundoff-limited.
        xs = np.linspace(0.01, 2.0 - 0.01, 301)
        assert np.all(bump(xs) > 0.0)
        edge = bump(np.array([1e-9, 2.0 - 1e-9]))
        assert np.all(np.abs(edge) < 1e-12)

    def test_continuity_and_smoothness_at_breakpoints(self):
        bump = build_hb_spline(2.0, 1.0)
        eps = 1e-7
        for knot in (1.0, 2.0, 3.0):
            left = bump(knot - eps)
            right = bump(knot + eps)
            assert right - left == pytest.approx(0.0, abs=1e-6)
        assert bump(0.0) == 0.0
        assert bump(4.0) == pytest.approx(0.0, abs=1e-15)

    def test_validation(self):
        with pytest.raises(ValueError):
            build_hb_spline(np.nan, 1.0)
        with pytest.raises(ValueError):
            build_hb_spline(1.0, 0.0)


class TestCollocation:
    def test_window_has_at_most_four_nonzeros(self):
        g = build_knot_grid(0.0, 1.0, 13)
        rng = np.random.default_rng(7)
        coll = collocation_matrix(g, 1.0, np.sort(rng.uniform(0, 1, 40)))
        dense = coll.toarray()
        assert coll.values.shape == (40, 4)
        assert np.all((dense != 0).sum(axis=1) <= 4)

    def test_dense_row_sums_match_matvec(self):
        g = build_knot_grid(0.0, 2.0, 9)
        coll = collocation_matrix(g, -0.8, np.linspace(0, 2, 30))
        coef = np.random.default_rng(3).standard_normal(g.n_basis)
        assert_allclose(coll.matvec(coef), coll.toarray() @ coef, rtol=1e-14, atol=0)

    def test_endpoints_are_inside(self):
        g = build_knot_grid(0.0, 1.0, 5)
        coll = collocation_matrix(g, 0.5, np.array([0.0, 1.0]))
        assert coll.first_col[0] == 0
        assert coll.first_col[-1] == g.n - 2

    def test_outside_site_raises(self):
        g = build_knot_grid(0.0, 1.0, 5)
        basis = HBBasis(g, 1.0)
        with pytest.raises(DomainError):
            basis.collocation(np.array([0.5, 1.0 + 1e-9]))
        with pytest.raises(DomainError):
            basis.collocation(np.array([-1e-9]))

    def test_rows_sum_to_one_for_alpha_zero(self):
        g = build_knot_grid(0.0, 1.0, 13)
        coll = collocation_matrix(g, 0.0, np.linspace(0, 1, 19))
        assert_allclose(coll.values.sum(axis=1), 1.0, rtol=0, atol=1e-12)


class TestReproduction:
    @pytest.mark.parametrize('alpha', [0.5, 1.0, 2.0])
    @pytest.mark.parametrize('sign', [1, -1])
    @pytest.mark.parametrize('times_x', [False, True])
    def test_family_members_certified(self, alpha, sign, times_x):
        g = build_knot_grid(0.0, 1.0, 13)
        coef = reproduction_coefficients(g, alpha, sign=sign, times_x=times_x)
        basis = HBBasis(g, alpha)
        xs = np.linspace(0.0, 1.0, 257)
        target = np.exp(sign * alpha * xs)
        if times_x:
            target = xs * target
        assert_allclose(basis.evaluate_combination(coef, xs), target,
                        rtol=0, atol=1e-10)

    def test_alpha_zero_reproduces_constants_and_line(self):
        g = build_knot_grid(-1.0, 2.0, 9)
        basis = HBBasis(g, 0.0)
        xs = np.linspace(-1.0, 2.0, 97)
        c0 = reproduction_coefficients(g, 0.0, times_x=False)
        c1 = reproduction_coefficients(g, 0.0, times_x=True)
        assert_allclose(basis.evaluate_combination(c0, xs), 1.0, atol=1e-12)
        assert_allclose(basis.evaluate_combination(c1, xs), xs, atol=1e-12)

    def test_shifted_interval(self):
        g = build_knot_grid(2.0, 5.0, 8)
        coef = reproduction_coefficients(g, 0.9, sign=-1)
        basis = HBBasis(g, 0.9)
        xs = np.linspace(2.0, 5.0, 101)
        assert_allclose(basis.evaluate_combination(coef, xs),
                        np.exp(-0.9 * xs), rtol=0, atol=1e-10)

    def test_bad_sign_rejected(self):
        g = build_knot_grid(0.0, 1.0, 5)
        with pytest.raises(ValueError):
            reproduction_coefficients(g, 1.0, sign=2)

    def test_unrepresentable_target_fails_certification(self, monkeypatch):
        # sabotage the check points so the fitted scalars are wrong
        import hpsplines.basis as basis_mod

        g = build_knot_grid(0.0, 1.0, 13)
        original = basis_mod.HBBasis.evaluate_combination

        def wrong(self, coef, x):
            return original(self, coef, x) + 1e-3

        monkeypatch.setattr(basis_mod.HBBasis, 'evaluate_combination', wrong)
        with pytest.raises(ReproductionCheckError):
            reproduction_coefficients(g, 1.0, sign=-1)
