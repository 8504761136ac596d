import math

import numpy as np
from django.conf import settings
from django.test import SimpleTestCase, override_settings
from scipy import integrate

from index_lab.catalog import UnknownFamily, analytic_index, catalog
from index_lab.checks import MissingField, cross_check
from index_lab.grids import GridSpec, InvalidGrid
from index_lab.serializers import report_from_json, report_to_json
from index_lab.smoothness import TailUnbounded, estimate_moments, smoothness_moments
from index_lab.sobolev import (
    DegenerateSymbol,
    IndexReport,
    NonpositiveRealPart,
    fit_continuity_exponent,
    fit_garding_exponent,
    sobolev_index,
)
from levy_measure.densities import nig_density
from symbol_core.families import (
    BrownianParams,
    CauchyParams,
    CGMYParams,
    GHParams,
    NIGParams,
    StableParams,
    StudentTParams,
)
from symbol_core.symbols import make_symbol, scaled_symbol, sum_symbol


def brownian():
    return make_symbol(BrownianParams(sigma=1.0, drift=0.0))


def variance_gamma():
    return make_symbol(CGMYParams(C=1.0, G=5.0, M=5.0, Y=0.0))


class GridSpecTests(SimpleTestCase):
    def test_rejects_short_range(self):
        with self.assertRaises(InvalidGrid):
            GridSpec(r_min=1e2, r_max=1e3)
        with self.assertRaises(InvalidGrid):
            GridSpec(r_min=0.5)

    def test_window_is_upper_half(self):
        grid = GridSpec()
        radii = grid.radii()
        self.assertEqual(len(radii), 65)
        self.assertAlmostEqual(radii[grid.window()][0], 1e4, delta=1e-6)
        self.assertEqual(np.count_nonzero(grid.window()), 33)

    def test_direction_counts(self):
        grid = GridSpec(directions=8)
        self.assertEqual(grid.direction_vectors(1).shape, (2, 1))
        self.assertEqual(grid.direction_vectors(2).shape, (8, 2))
        norms = np.linalg.norm(grid.direction_vectors(3), axis=1)
        np.testing.assert_allclose(norms, 1.0)


class ContinuityExponentTests(SimpleTestCase):
    def test_brownian(self):
        alpha, diagnostics = fit_continuity_exponent(brownian(), GridSpec())
        self.assertAlmostEqual(alpha, 2.0, delta=0.01)
        self.assertEqual(len(diagnostics["slopes"]), 2)
        self.assertFalse(diagnostics["sub_polynomial"])

    def test_cauchy(self):
        alpha, _ = fit_continuity_exponent(make_symbol(CauchyParams(c=1.0, gamma=0.0)))
        self.assertAlmostEqual(alpha, 1.0, delta=0.01)

    def test_variance_gamma_is_sub_polynomial(self):
        alpha, diagnostics = fit_continuity_exponent(variance_gamma())
        self.assertLess(alpha, 0.15)
        self.assertTrue(diagnostics["sub_polynomial"])

    def test_zero_symbol(self):
        with self.assertRaises(DegenerateSymbol):
            fit_continuity_exponent(make_symbol(BrownianParams(sigma=0.0, drift=0.0)))


class GardingExponentTests(SimpleTestCase):
    def test_nig(self):
        alpha, _ = fit_garding_exponent(make_symbol(NIGParams(alpha=10.0, beta=3.0, delta=1.0, mu=0.0)))
        self.assertAlmostEqual(alpha, 1.0, delta=0.02)

    def test_cgmy(self):
        alpha, diagnostics = fit_garding_exponent(make_symbol(CGMYParams(C=1.0, G=5.0, M=5.0, Y=1.5)))
        self.assertAlmostEqual(alpha, 1.5, delta=0.02)
        self.assertGreater(diagnostics["constant"], 0.0)

    def test_student_t(self):
        alpha, _ = fit_garding_exponent(make_symbol(StudentTParams(f=4.0, delta=1.0, mu=0.0)))
        self.assertAlmostEqual(alpha, 1.0, delta=0.05)

    def test_pure_drift(self):
        with self.assertRaises(NonpositiveRealPart):
            fit_garding_exponent(make_symbol(BrownianParams(sigma=0.0, drift=1.0)))


class SobolevIndexTests(SimpleTestCase):
    def test_brownian_plus_nig(self):
        nig = make_symbol(NIGParams(alpha=10.0, beta=3.0, delta=1.0, mu=0.0))
        report = sobolev_index(sum_symbol(brownian(), nig))
        self.assertAlmostEqual(report.sobolev_index, 2.0, delta=0.05)

    def test_strictly_stable(self):
        report = sobolev_index(make_symbol(StableParams(alpha=0.7, c=1.0, beta=0.0, tau=0.0)))
        self.assertAlmostEqual(report.sobolev_index, 0.7, delta=0.02)

    def test_non_strict_one_stable_has_no_index(self):
        symbol = make_symbol(StableParams(alpha=1.0, c=1.0, beta=0.5, tau=0.0))
        for tol in (0.05, 0.2):
            report = sobolev_index(symbol, tol=tol)
            self.assertIsNone(report.sobolev_index)
            self.assertFalse(report.diagnostics["checks"]["bounded_ratio"])

    def test_variance_gamma_has_no_index(self):
        symbol = variance_gamma()
        for tol in (0.05, 0.1, 0.2):
            self.assertIsNone(sobolev_index(symbol, tol=tol).sobolev_index)

    def test_degenerate_symbol_gives_report(self):
        report = sobolev_index(make_symbol(BrownianParams(sigma=0.0, drift=0.0)))
        self.assertIsNone(report.sobolev_index)
        self.assertIn("reason", report.diagnostics)

    def test_catalog_recovery(self):
        params = [
            BrownianParams(sigma=1.0, drift=0.0),
            NIGParams(alpha=10.0, beta=3.0, delta=1.0, mu=0.0),
            CauchyParams(c=1.0, gamma=0.0),
            StudentTParams(f=4.0, delta=1.0, mu=0.0),
        ]
        params += [CGMYParams(C=1.0, G=5.0, M=5.0, Y=Y) for Y in (0.5, 1.0, 1.2, 1.5, 1.8)]
        params += [StableParams(alpha=alpha, c=1.0) for alpha in (0.3, 0.7, 1.0, 1.6)]
        for record in params:
            with self.subTest(record=record):
                report = sobolev_index(make_symbol(record))
                self.assertIsNotNone(report.sobolev_index)
                self.assertAlmostEqual(report.sobolev_index, analytic_index(record), delta=0.05)

    def test_scaling_leaves_exponents(self):
        symbol = make_symbol(CGMYParams(C=1.0, G=5.0, M=5.0, Y=1.5))
        doubled = scaled_symbol(symbol, 2.0)
        self.assertAlmostEqual(fit_continuity_exponent(symbol)[0], fit_continuity_exponent(doubled)[0], delta=1e-6)
        self.assertAlmostEqual(fit_garding_exponent(symbol)[0], fit_garding_exponent(doubled)[0], delta=1e-6)

    def test_sum_garding_is_monotone(self):
        first = make_symbol(CGMYParams(C=1.0, G=5.0, M=5.0, Y=0.5))
        second = make_symbol(StableParams(alpha=1.6, c=1.0))
        combined = fit_garding_exponent(sum_symbol(first, second))[0]
        parts = max(fit_garding_exponent(first)[0], fit_garding_exponent(second)[0])
        self.assertGreaterEqual(combined, parts - 0.05)

    def test_brownian_has_zero_jump_indices(self):
        report = sobolev_index(brownian())
        self.assertEqual((report.beta, report.gamma), (0.0, 0.0))
        self.assertTrue(report.verdicts["beta_ge_index"]["skipped"])

    def test_cgmy_indices_are_ordered(self):
        for Y in (0.3, 0.6, 0.9, 1.2, 1.5, 1.8):
            with self.subTest(Y=Y):
                report = sobolev_index(make_symbol(CGMYParams(C=1.0, G=5.0, M=5.0, Y=Y)))
                self.assertAlmostEqual(report.beta, Y, delta=0.05)
                self.assertGreaterEqual(report.beta, report.gamma - 0.05)
                if report.sobolev_index is not None:
                    self.assertGreaterEqual(report.beta, report.sobolev_index - 0.05)
                verdicts = cross_check(report)
                self.assertTrue(verdicts["beta_ge_gamma"]["passed"])
                self.assertTrue(verdicts["beta_ge_index"]["passed"])

    def test_gh_table_has_index_one(self):
        x = np.logspace(-2.0, math.log10(20.0), 60)
        f = nig_density(3.0, 0.0, 1.0)(x)
        params = GHParams(
            C1=1.0 / math.pi,
            table_x=tuple(np.concatenate([-x[::-1], x])),
            table_f=tuple(np.concatenate([f[::-1], f])),
        )
        report = sobolev_index(make_symbol(params))
        self.assertAlmostEqual(report.sobolev_index, 1.0, delta=0.05)
        self.assertAlmostEqual(report.beta, 1.0, delta=0.05)
        self.assertTrue(cross_check(report)["beta_ge_index"]["passed"])


class CrossCheckTests(SimpleTestCase):
    def report(self, **fields):
        values = {"alpha_cont": 1.2, "alpha_gard": 1.2, "sobolev_index": 1.2, "beta": 1.2, "gamma": 1.19}
        values.update(fields)
        return IndexReport(**values)

    def test_missing_field(self):
        with self.assertRaises(MissingField):
            cross_check(self.report(beta=None))

    def test_full_index_skips_second_verdict(self):
        verdicts = cross_check(self.report(sobolev_index=2.0, beta=0.0, gamma=0.0))
        self.assertTrue(verdicts["beta_ge_index"]["skipped"])
        self.assertTrue(verdicts["beta_ge_gamma"]["passed"])

    def test_margins(self):
        verdicts = cross_check(self.report(beta=1.0))
        self.assertFalse(verdicts["beta_ge_index"]["passed"])
        self.assertAlmostEqual(verdicts["beta_ge_index"]["margin"], -0.2)
        self.assertEqual(verdicts["beta_ge_index"]["slack"], 0.05)
        self.assertTrue(cross_check(self.report(beta=1.16))["beta_ge_index"]["passed"])


class AnalyticIndexTests(SimpleTestCase):
    def test_catalog_values(self):
        table = GHParams(C1=1.0, table_x=(0.5, 1.0), table_f=(1.0, 0.5))
        self.assertEqual(analytic_index(table), 1.0)
        self.assertIsNone(analytic_index(CGMYParams(Y=0.0)))
        self.assertEqual(analytic_index(BrownianParams(sigma=1.0)), 2.0)
        self.assertIsNone(analytic_index(BrownianParams(sigma=0.0)))
        self.assertEqual(analytic_index(StudentTParams()), 1.0)

    def test_stable_cases(self):
        self.assertEqual(analytic_index(StableParams(alpha=1.6, tau=1.0)), 1.6)
        self.assertEqual(analytic_index(StableParams(alpha=1.0, beta=0.0, tau=1.0)), 1.0)
        self.assertIsNone(analytic_index(StableParams(alpha=1.0, beta=0.5)))
        self.assertIsNone(analytic_index(StableParams(alpha=0.5, tau=1.0)))

    def test_cgmy_drift_convention(self):
        self.assertEqual(analytic_index(CGMYParams(G=2.0, M=5.0, Y=0.5)), 0.5)
        self.assertIsNone(analytic_index(CGMYParams(G=2.0, M=5.0, Y=0.5, drift_convention="zero")))
        self.assertEqual(analytic_index(CGMYParams(G=5.0, M=5.0, Y=0.5, drift_convention="zero")), 0.5)

    def test_unknown_family(self):
        with self.assertRaises(UnknownFamily):
            analytic_index(object())

    def test_catalog_listing(self):
        entries = catalog()
        cases = [entry.case for entry in entries]
        self.assertEqual(len(cases), len(set(cases)))
        by_case = {entry.case: entry.index for entry in entries}
        self.assertIsNone(by_case["cgmy_Y0"])
        self.assertIsNone(by_case["stable_1_skewed"])
        self.assertEqual(by_case["gh"], 1.0)
        self.assertEqual(by_case["cgmy_Y1.5"], 1.5)


class SmoothnessMomentTests(SimpleTestCase):
    def test_brownian_mass(self):
        moments = smoothness_moments(brownian(), 1.0, 2)
        self.assertAlmostEqual(moments[0], math.sqrt(2.0 * math.pi), delta=1e-8)
        # second moment of exp(-xi^2 / 2)
        self.assertAlmostEqual(moments[2], math.sqrt(2.0 * math.pi), delta=1e-8)

    def test_nig_moments_are_certified(self):
        symbol = make_symbol(NIGParams(alpha=10.0, beta=0.0, delta=1.0, mu=0.0))
        estimates = estimate_moments(symbol, 1.0, 8)
        self.assertEqual([estimate.order for estimate in estimates], list(range(9)))
        for estimate in estimates:
            self.assertTrue(np.isfinite(estimate.value))
            self.assertLess(estimate.tail_bound, 1e-8 * estimate.value)

    def test_cgmy_against_wide_quadrature(self):
        symbol = make_symbol(CGMYParams(C=1.0, G=5.0, M=5.0, Y=0.5))
        moments = smoothness_moments(symbol, 0.1, 4)
        edges = np.concatenate([[0.0], np.logspace(-3, 5, 81)])
        for n, value in enumerate(moments):
            def integrand(r):
                return 2.0 * r ** n * math.exp(-0.1 * symbol.evaluator(np.array([[r]]))[0].real)
            reference = sum(
                integrate.quad(integrand, a, b, epsabs=0.0, epsrel=1e-11, limit=200)[0]
                for a, b in zip(edges[:-1], edges[1:])
            )
            self.assertAlmostEqual(value / reference, 1.0, delta=1e-6)

    def test_cgmy_moments_up_to_eight(self):
        symbol = make_symbol(CGMYParams(C=1.0, G=5.0, M=5.0, Y=1.5))
        estimates = estimate_moments(symbol, 1.0, 8)
        self.assertEqual([estimate.order for estimate in estimates], list(range(9)))
        edges = np.concatenate([[0.0], np.logspace(-3, 2, 51)])
        for estimate in estimates:
            with self.subTest(order=estimate.order):
                self.assertLess(estimate.tail_bound, 1e-8 * estimate.value)

                def integrand(r, n=estimate.order):
                    return 2.0 * r ** n * math.exp(-symbol.evaluator(np.array([[r]]))[0].real)

                reference = sum(
                    integrate.quad(integrand, a, b, epsabs=0.0, epsrel=1e-11, limit=200)[0]
                    for a, b in zip(edges[:-1], edges[1:])
                )
                self.assertAlmostEqual(estimate.value / reference, 1.0, delta=1e-6)

    def test_no_index_means_no_tail_bound(self):
        with self.assertRaises(TailUnbounded):
            smoothness_moments(variance_gamma(), 1.0, 2)

class DefaultsTableTests(SimpleTestCase):
    def table(self, **changes):
        return dict(settings.LEVYSOBOLEV_DEFAULTS, **changes)

    def test_grid_follows_table(self):
        with override_settings(LEVYSOBOLEV_DEFAULTS=self.table(grid_points_per_decade=8, grid_r_max=1e5)):
            grid = GridSpec()
        self.assertEqual(grid.points_per_decade, 8)
        self.assertEqual(grid.r_max, 1e5)
        self.assertEqual(len(grid.radii()), 25)

    def test_index_tolerance_follows_table(self):
        with override_settings(LEVYSOBOLEV_DEFAULTS=self.table(index_tol=0.2)):
            report = sobolev_index(brownian())
        self.assertEqual(report.diagnostics["tol"], 0.2)

    def test_sub_polynomial_slope_follows_table(self):
        symbol = make_symbol(CGMYParams(C=1.0, G=5.0, M=5.0, Y=0.3))
        self.assertFalse(fit_continuity_exponent(symbol, GridSpec())[1]["sub_polynomial"])
        with override_settings(LEVYSOBOLEV_DEFAULTS=self.table(subpolynomial_slope=0.5)):
            self.assertTrue(fit_continuity_exponent(symbol, GridSpec())[1]["sub_polynomial"])

    def test_moment_tail_tolerance_follows_table(self):
        with override_settings(LEVYSOBOLEV_DEFAULTS=self.table(moment_tail_tol=0.0)):
            with self.assertRaises(TailUnbounded):
                smoothness_moments(brownian(), 1.0, 2)


class IndexReportSerializerTests(SimpleTestCase):
    def test_json_round_trip(self):
        report = sobolev_index(make_symbol(CauchyParams(c=1.0, gamma=0.0)))
        self.assertEqual(report_from_json(report_to_json(report)), report)
        self.assertEqual(report_from_json(report_to_json(report, header={"index_tol": 0.05})), report)

    def test_keys(self):
        raw = report_to_json(IndexReport(alpha_cont=1.0, alpha_gard=1.0, sobolev_index=1.0))
        self.assertIn(b'"alpha_cont"', raw)
        self.assertIn(b'"diagnostics"', raw)
        self.assertIn(b'"verdicts"', raw)
