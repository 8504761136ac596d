import math
import tempfile
from pathlib import Path
from unittest.mock import patch

import numpy as np
from django.conf import settings
from django.test import SimpleTestCase, override_settings

from levy_measure.bounds import check_density_conditions, verify_appendix_bounds
from levy_measure.densities import (
    LevyDensity,
    cauchy_density,
    cgmy_density,
    load_density_table,
    power_law_density,
    tabulated_density,
)
from levy_measure.indices import bg_index, gamma_index
from levy_measure.quadrature import (
    DivergentIntegral,
    NotOneDimensional,
    QuadratureFailure,
    power_law_cosine_integral,
    split_symmetric,
    symbol_parts_from_density,
)
from symbol_core.constants import Truncation
from symbol_core.families import CGMYParams
from symbol_core.symbols import evaluate, make_symbol
from symbol_core.utils import InvalidParams


def bounded_density():
    return LevyDensity(evaluator=lambda x: np.exp(-np.asarray(x) ** 2), cutoff=10.0, label="bounded")


class DensityTests(SimpleTestCase):
    def test_rejects_negative_values(self):
        with self.assertRaises(InvalidParams):
            LevyDensity(evaluator=lambda x: -np.ones(np.shape(x)), label="negative")

    def test_hint_needs_both_parts(self):
        with self.assertRaises(InvalidParams):
            LevyDensity(evaluator=lambda x: np.ones(np.shape(x)), hint_Y=0.5)

    def test_tabulated_power_law(self):
        xs = np.logspace(-2.0, 1.0, 13)
        table_x = np.concatenate([xs, -xs])
        table_f = np.abs(table_x) ** -1.5
        density = tabulated_density(table_x, table_f)
        points = np.array([0.05, -0.3, 7.0])
        np.testing.assert_allclose(density(points), np.abs(points) ** -1.5, rtol=1e-12)
        # continued below the table, zero beyond it
        self.assertAlmostEqual(density(np.array([1e-3]))[0] / 1e-3 ** -1.5, 1.0, delta=1e-10)
        self.assertEqual(density(np.array([20.0]))[0], 0.0)

    def test_load_table(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "table.csv"
            path.write_text("x,f\n# comment\n0.5,2.0\n1.0,1.0\n-1.0,0.5\n", encoding="utf-8")
            self.assertEqual(load_density_table(path), ((0.5, 1.0, -1.0), (2.0, 1.0, 0.5)))
            path.write_text("x,f\n", encoding="utf-8")
            with self.assertRaises(InvalidParams):
                load_density_table(path)


class SplitSymmetricTests(SimpleTestCase):
    def test_cgmy(self):
        split = split_symmetric(cgmy_density(1.0, 2.0, 4.0, 0.5))
        x = np.array([0.01, 0.5, -2.0])
        expected = 0.5 * (np.exp(-2.0 * np.abs(x)) + np.exp(-4.0 * np.abs(x))) / np.abs(x) ** 1.5
        np.testing.assert_allclose(split.symmetric(x), expected, rtol=1e-14)
        self.assertFalse(split.is_symmetric)

    def test_symmetric_density(self):
        split = split_symmetric(cgmy_density(1.0, 5.0, 5.0, 0.5))
        self.assertTrue(split.is_symmetric)
        self.assertTrue(np.all(split.antisymmetric(np.linspace(0.1, 3.0, 7)) == 0.0))

    def test_skewed_density(self):
        def evaluator(x):
            x = np.asarray(x)
            return np.exp(-np.abs(x)) / np.abs(x) ** 1.2 * (1.0 + 0.5 * np.sign(x))

        split = split_symmetric(LevyDensity(evaluator=evaluator, cutoff=50.0, label="skewed"))
        x = np.array([0.2, -1.5])
        np.testing.assert_allclose(
            split.antisymmetric(x), 0.5 * np.sign(x) * np.exp(-np.abs(x)) / np.abs(x) ** 1.2, rtol=1e-14
        )
        self.assertTrue(np.all(np.abs(split.antisymmetric(x)) <= split.symmetric(x)))

    def test_dimension(self):
        planar = LevyDensity(evaluator=lambda x: np.ones(np.shape(x)), label="planar", dimension=2)
        with self.assertRaises(NotOneDimensional):
            split_symmetric(planar)

    def test_levy_measure_condition(self):
        steep = LevyDensity(evaluator=lambda x: np.abs(np.asarray(x)) ** -3.0, cutoff=1.0, label="steep")
        with self.assertRaises(DivergentIntegral):
            split_symmetric(steep)


class SymbolPartsTests(SimpleTestCase):
    def test_cauchy_type(self):
        split = split_symmetric(power_law_density(1.0, 1.0))
        a_fs, a_fas = symbol_parts_from_density(split, 3.0)
        self.assertAlmostEqual(a_fs, 3.0 * math.pi, delta=1e-8)
        self.assertEqual(a_fas, 0j)

    def test_zero_frequency(self):
        split = split_symmetric(cgmy_density(1.0, 2.0, 4.0, 0.5))
        self.assertEqual(symbol_parts_from_density(split, 0.0), (0.0, 0j))

    def test_cgmy_real_part(self):
        split = split_symmetric(cgmy_density(1.0, 5.0, 5.0, 0.5))
        a_fs, _ = symbol_parts_from_density(split, 10.0)
        expected = evaluate(make_symbol(CGMYParams(C=1.0, G=5.0, M=5.0, Y=0.5)), 10.0).real
        self.assertAlmostEqual(a_fs / expected, 1.0, delta=1e-6)

    def test_cosine_integral_series_and_tail(self):
        # integral of (1 - cos t) / t^2 over [0, inf) is pi / 2
        self.assertAlmostEqual(power_law_cosine_integral(math.inf, 1.0), math.pi / 2.0, delta=1e-9)
        self.assertAlmostEqual(power_law_cosine_integral(1e-3, 1.0), 5e-4 - 1e-9 / 72.0, delta=1e-15)

    def test_refinement_is_stable(self):
        split = split_symmetric(cgmy_density(1.0, 2.0, 4.0, 0.5))
        for u in (1.0, 25.0):
            coarse = symbol_parts_from_density(split, u)
            fine = symbol_parts_from_density(split, u, eps=0.5e-4, limit=400)
            scale = abs(coarse[0]) + abs(coarse[1])
            self.assertLess(abs(fine[0] - coarse[0]), 1e-8 * scale)
            self.assertLess(abs(fine[1] - coarse[1]), 1e-8 * scale)

    def test_first_moment_precondition(self):
        split = split_symmetric(power_law_density(1.0, 0.5, skew=0.5))
        with self.assertRaises(DivergentIntegral):
            symbol_parts_from_density(split, 2.0)
        a_fs, a_fas = symbol_parts_from_density(split, 2.0, truncation=Truncation.UNIT_BALL)
        self.assertGreater(a_fs, 0.0)
        self.assertEqual(a_fas.real, 0.0)

    def test_tolerance_is_enforced(self):
        split = split_symmetric(cgmy_density(1.0, 5.0, 5.0, 0.5))
        with patch("levy_measure.quadrature._symmetric_part", return_value=(1.0, 1.0)):
            with self.assertRaises(QuadratureFailure):
                symbol_parts_from_density(split, 2.0)

    def test_tolerance_comes_from_the_defaults_table(self):
        split = split_symmetric(cgmy_density(1.0, 5.0, 5.0, 0.5))
        table = {**settings.LEVYSOBOLEV_DEFAULTS, "quadrature_tol": 1.0}
        with override_settings(LEVYSOBOLEV_DEFAULTS=table):
            with patch("levy_measure.quadrature._symmetric_part", return_value=(1.0, 1.0)):
                a_fs, _ = symbol_parts_from_density(split, 2.0)
        self.assertEqual(a_fs, 1.0)


class JumpIndexTests(SimpleTestCase):
    def test_bg_index_cgmy(self):
        self.assertAlmostEqual(bg_index(cgmy_density(1.0, 5.0, 5.0, 0.5)), 0.5, delta=0.02)
        self.assertAlmostEqual(bg_index(cgmy_density(1.0, 5.0, 5.0, 1.5)), 1.5, delta=0.02)

    def test_bounded_density(self):
        self.assertEqual(bg_index(bounded_density()), 0.0)
        self.assertEqual(gamma_index(bounded_density()), 0.0)

    def test_gamma_index(self):
        self.assertAlmostEqual(gamma_index(cgmy_density(1.0, 5.0, 5.0, 1.2)), 1.2, delta=0.05)
        self.assertAlmostEqual(gamma_index(cauchy_density(math.pi)), 1.0, delta=0.05)

    def test_beta_dominates_gamma(self):
        for density in (
            cgmy_density(1.0, 2.0, 4.0, 0.3),
            cgmy_density(1.0, 5.0, 5.0, 1.2),
            cauchy_density(1.0),
            bounded_density(),
        ):
            with self.subTest(density=density.label):
                self.assertGreaterEqual(bg_index(density), gamma_index(density) - 0.05)


class AppendixBoundTests(SimpleTestCase):
    grid = np.logspace(0.0, 4.0, 17)

    def test_cgmy(self):
        report = verify_appendix_bounds(split_symmetric(cgmy_density(1.0, 5.0, 5.0, 1.5)), 1.5, self.grid)
        self.assertTrue(report.passed)
        self.assertFalse(report.parts["d"].applicable)

    def test_cauchy_type(self):
        report = verify_appendix_bounds(split_symmetric(power_law_density(1.0, 1.0)), 1.0, self.grid)
        self.assertTrue(report.parts["a"].passed)
        self.assertTrue(report.parts["b"].passed)
        self.assertAlmostEqual(report.parts["b"].constants["C1"], 0.5 * math.pi, delta=1e-6)
        self.assertFalse(report.parts["c"].applicable)

    def test_variance_gamma_lower_bound_fails(self):
        split = split_symmetric(cgmy_density(1.0, 5.0, 5.0, 0.0))
        for Y in (0.5, 1.0, 1.5):
            with self.subTest(Y=Y):
                self.assertFalse(verify_appendix_bounds(split, Y, self.grid).parts["b"].passed)

    def test_rejects_bad_exponent(self):
        with self.assertRaises(InvalidParams):
            verify_appendix_bounds(split_symmetric(cauchy_density(1.0)), 2.0, self.grid)


class DensityConditionTests(SimpleTestCase):
    def test_cases(self):
        finite = check_density_conditions(cgmy_density(1.0, 2.0, 4.0, 0.5))
        self.assertEqual(finite.case, "finite_variation")
        self.assertTrue(finite.holds)
        self.assertEqual(finite.index, 0.5)
        self.assertEqual(check_density_conditions(cauchy_density(1.0)).case, "cauchy_like")
        self.assertTrue(check_density_conditions(cgmy_density(1.0, 5.0, 5.0, 1.5)).holds)

    def test_variance_gamma(self):
        report = check_density_conditions(cgmy_density(1.0, 5.0, 5.0, 0.0))
        self.assertEqual(report.case, "none")
        self.assertFalse(report.holds)
        self.assertIsNone(report.index)

    def test_drift_convention_matters(self):
        report = check_density_conditions(cgmy_density(1.0, 2.0, 4.0, 0.5), drift_is_mean_jump=False)
        self.assertFalse(report.holds)
