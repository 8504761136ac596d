import math
import os
import tempfile

import numpy as np
from django.test import SimpleTestCase
from scipy import integrate, stats

from index_lab.catalog import catalog
from index_lab.grids import InvalidGrid
from spectral_solver.evolution import Scheme, Trajectory, UnstableScheme, evolve
from spectral_solver.exports import trajectory_rows, value_rows, write_csv
from spectral_solver.forms import (
    apply_operator,
    bilinear_form,
    check_imaginary_domination,
    elementary_shift,
    operator_norm_bound,
    random_fields,
    sobolev_norm,
    sobolev_norm_sq,
    symbol_on_grid,
    verify_form_inequalities,
    weighted_norm,
)
from spectral_solver.grids import FrequencyGrid, GridMismatch, SpectralField
from spectral_solver.inversion import TailTooFat, conditional_expectation, density, density_on_window
from spectral_solver.payoffs import gaussian_payoff, gaussian_values, hermite_function, hermite_payoff
from spectral_solver.serializers import form_report_from_json, form_report_to_json
from symbol_core.constants import Family
from symbol_core.families import BrownianParams, CauchyParams, CGMYParams, NIGParams, StableParams
from symbol_core.symbols import Symbol, make_symbol
from symbol_core.utils import InvalidParams

GRID = FrequencyGrid(dimension=1, modes=4096, cutoff=64.0)
SMALL_GRID = FrequencyGrid(dimension=1, modes=512, cutoff=64.0)


def brownian():
    return make_symbol(BrownianParams(sigma=1.0, drift=0.0))


def cgmy(Y=1.5):
    return make_symbol(CGMYParams(C=1.0, G=5.0, M=5.0, Y=Y))


def gaussian_field(grid=GRID):
    return SpectralField.from_function(grid, lambda xi: np.exp(-0.5 * xi ** 2), real_valued=True)


def box_field(grid=GRID, radius=1.0):
    return SpectralField(grid, (np.abs(grid.axis()) <= radius).astype(float), True)


class FrequencyGridTests(SimpleTestCase):
    def test_rejects_bad_grids(self):
        for kwargs in (
            {"dimension": 1, "modes": 12, "cutoff": 1.0},
            {"dimension": 1, "modes": 4, "cutoff": 1.0},
            {"dimension": 1, "modes": 16, "cutoff": 0.0},
            {"dimension": 3, "modes": 16, "cutoff": 1.0},
        ):
            with self.assertRaises(InvalidGrid):
                FrequencyGrid(**kwargs)

    def test_axis_and_period(self):
        grid = FrequencyGrid(dimension=1, modes=8, cutoff=4.0)
        self.assertEqual(grid.spacing, 1.0)
        np.testing.assert_array_equal(grid.axis(), np.arange(-4.0, 4.0))
        self.assertAlmostEqual(grid.period, 2.0 * math.pi)
        self.assertEqual(FrequencyGrid(2, 8, 4.0).frequencies().shape, (8, 8, 2))

    def test_mirror_maps_xi_to_minus_xi(self):
        grid = FrequencyGrid(dimension=1, modes=8, cutoff=4.0)
        mirrored = grid.mirror(grid.axis())
        np.testing.assert_array_equal(mirrored[1:], -grid.axis()[1:])
        self.assertEqual(mirrored[0], -4.0)


class SpectralFieldTests(SimpleTestCase):
    def test_real_valued_flag_is_checked(self):
        gaussian_field()
        with self.assertRaises(InvalidParams):
            SpectralField.from_function(GRID, lambda xi: (1.0 + 0.5j) * np.exp(-xi ** 2), real_valued=True)

    def test_shape_mismatch(self):
        with self.assertRaises(GridMismatch):
            SpectralField(GRID, np.zeros(16))

    def test_symmetrized(self):
        raw = SpectralField.from_function(GRID, lambda xi: (1.0 + 0.5j) * np.exp(-xi ** 2))
        self.assertLess(raw.symmetrized().conj_symmetry_gap(), 1e-15)


class SobolevNormTests(SimpleTestCase):
    def test_zero_field(self):
        self.assertEqual(sobolev_norm(SpectralField.zeros(GRID), 1.0), 0.0)

    def test_box_integral(self):
        self.assertLessEqual(abs(sobolev_norm_sq(box_field(), 0.0) - 2.0), 2.0 * GRID.spacing)

    def test_gaussian_with_weight(self):
        # e^{-xi^2}(1 + |xi|)^2 integrates to 1.5 sqrt(pi) + 2; the |xi| kink costs O(dxi^2)
        self.assertAlmostEqual(sobolev_norm_sq(gaussian_field(), 1.0), 1.5 * math.sqrt(math.pi) + 2.0, delta=1e-3)

    def test_norms_interleave(self):
        field = SpectralField(SMALL_GRID, random_fields(SMALL_GRID, 1, seed=3)[0], True)
        norms = [sobolev_norm(field, s) for s in (-0.5, 0.0, 0.5, 1.0)]
        self.assertEqual(norms, sorted(norms))

    def test_weighted_norm(self):
        expected = math.sqrt(1.25 * math.sqrt(math.pi))
        self.assertAlmostEqual(weighted_norm(brownian(), gaussian_field()), expected, delta=1e-10)


class BilinearFormTests(SimpleTestCase):
    def test_zero_field(self):
        self.assertEqual(bilinear_form(cgmy(), SpectralField.zeros(GRID), gaussian_field()), 0.0)

    def test_brownian_gaussian(self):
        field = gaussian_field()
        value = bilinear_form(brownian(), field, field)
        self.assertAlmostEqual(value.real, math.sqrt(math.pi) / 4.0, delta=1e-10)
        self.assertEqual(value.imag, 0.0)

    def test_cauchy_box(self):
        field = box_field(radius=2.0)
        value = bilinear_form(make_symbol(CauchyParams(c=1.0, gamma=0.0)), field, field)
        self.assertLessEqual(abs(value.real - 4.0), 2.0 * GRID.spacing + 1e-12)

    def test_grid_mismatch(self):
        with self.assertRaises(GridMismatch):
            bilinear_form(brownian(), gaussian_field(), gaussian_field(SMALL_GRID))

    def test_parseval_real_part(self):
        symbol = make_symbol(NIGParams(alpha=10.0, beta=3.0, delta=1.0, mu=0.0))
        field = SpectralField(GRID, random_fields(GRID, 1, seed=7)[0], True)
        values = symbol_on_grid(symbol, GRID)
        expected = math.fsum((values.real * np.abs(field.coefficients) ** 2).ravel()) * GRID.cell
        self.assertAlmostEqual(bilinear_form(symbol, field, field).real, expected, delta=1e-12 * expected)

    def test_apply_operator(self):
        symbol = cgmy()
        u = SpectralField(SMALL_GRID, random_fields(SMALL_GRID, 1, seed=1)[0], True)
        v = SpectralField(SMALL_GRID, random_fields(SMALL_GRID, 1, seed=2)[0], True)
        image = apply_operator(symbol, u)
        direct = np.sum(image.coefficients * np.conj(v.coefficients)) * SMALL_GRID.cell
        self.assertAlmostEqual(abs(bilinear_form(symbol, u, v) - direct), 0.0, delta=1e-9 * abs(direct))

    def test_operator_norm_bound(self):
        bound = operator_norm_bound(cgmy(), s=1.0, alpha=1.5, grid=SMALL_GRID, trials=100)
        self.assertTrue(bound.holds)
        self.assertGreater(bound.worst_ratio, 0.0)


class ImaginaryDominationTests(SimpleTestCase):
    def test_symmetric_symbol(self):
        result = check_imaginary_domination(brownian(), grid=SMALL_GRID)
        self.assertEqual(result.constant, 0.0)
        self.assertEqual(result.continuity_constant, 1.0)
        self.assertTrue(result.bounded)

    def test_skewed_nig_is_bounded(self):
        symbol = make_symbol(NIGParams(alpha=10.0, beta=3.0, delta=1.0, mu=0.0))
        result = check_imaginary_domination(symbol, grid=SMALL_GRID)
        self.assertTrue(result.bounded)
        self.assertGreater(result.constant, 0.0)

    def test_skewed_one_stable_is_not(self):
        symbol = make_symbol(StableParams(alpha=1.0, c=1.0, beta=0.5, tau=0.0))
        self.assertFalse(check_imaginary_domination(symbol, grid=SMALL_GRID).bounded)


class ElementaryShiftTests(SimpleTestCase):
    def test_constant_lower_order(self):
        self.assertEqual(elementary_shift(1.0, 0.5, 0.0, 2.0, 0.0), 0.5)

    def test_shift_is_sharp(self):
        C4 = elementary_shift(1.0, 2.0, 0.5, 2.0, 1.0)
        self.assertAlmostEqual(C4, 2.0)
        x = np.linspace(0.0, 10.0, 1001)
        gap = (1.0 * x ** 2 - 2.0 * x) - (0.5 * x ** 2 - C4)
        self.assertGreaterEqual(gap.min(), -1e-12)
        self.assertAlmostEqual(gap.min(), 0.0, delta=1e-12)

    def test_invalid_constants(self):
        with self.assertRaises(InvalidParams):
            elementary_shift(1.0, 1.0, 1.0, 2.0, 1.0)
        with self.assertRaises(InvalidParams):
            elementary_shift(2.0, 1.0, 1.0, 1.0, 1.0)


class FormInequalityTests(SimpleTestCase):
    def test_brownian(self):
        report = verify_form_inequalities(brownian(), 2.0, trials=500, grid=GRID)
        self.assertTrue(report.passed)
        self.assertGreaterEqual(report.garding_c2, 0.2)
        self.assertLessEqual(report.continuity_constant, report.continuity_bound)

    def test_cgmy(self):
        self.assertTrue(verify_form_inequalities(cgmy(1.5), 1.5, trials=500, grid=SMALL_GRID).passed)

    def test_variance_gamma_fails_garding(self):
        for alpha in (0.2, 0.5, 1.0):
            report = verify_form_inequalities(cgmy(0.0), alpha, trials=100, grid=SMALL_GRID)
            self.assertTrue(report.continuity_passed, alpha)
            self.assertFalse(report.garding_passed, alpha)
            self.assertLess(report.garding_trend, -0.05)

    def test_catalog_members_with_index(self):
        for entry in catalog():
            if entry.params is None or entry.index is None:
                continue
            report = verify_form_inequalities(make_symbol(entry.params), entry.index, trials=500, grid=SMALL_GRID)
            self.assertTrue(report.passed, entry.case)
            self.assertGreater(report.garding_c2, 0.0, entry.case)

    def test_seeded_reports_repeat(self):
        first = verify_form_inequalities(cgmy(1.2), 1.2, trials=50, grid=SMALL_GRID, seed=4)
        second = verify_form_inequalities(cgmy(1.2), 1.2, trials=50, grid=SMALL_GRID, seed=4)
        self.assertEqual(first, second)

    def test_alpha_range(self):
        with self.assertRaises(InvalidParams):
            verify_form_inequalities(brownian(), 2.5, trials=10, grid=SMALL_GRID)

    def test_json_round_trip(self):
        report = verify_form_inequalities(brownian(), 2.0, trials=20, grid=SMALL_GRID)
        raw = form_report_to_json(report, header={"form_trials": 20})
        self.assertEqual(form_report_from_json(raw), report)


class EvolveTests(SimpleTestCase):
    def test_heat_semigroup(self):
        trajectory = evolve(brownian(), gaussian_field(), T=1.0, K=1, scheme=Scheme.EXACT)
        np.testing.assert_allclose(trajectory.final.coefficients, np.exp(-GRID.axis() ** 2), rtol=0, atol=1e-15)

    def test_semigroup_property(self):
        symbol = cgmy()
        first = evolve(symbol, gaussian_field(), T=0.3, K=4)
        second = evolve(symbol, first.final, T=0.45, K=6, t0=0.3)
        direct = evolve(symbol, gaussian_field(), T=0.75, K=1)
        gap = np.max(np.abs(second.final.coefficients - direct.final.coefficients))
        self.assertLess(gap, 1e-12)
        self.assertAlmostEqual(second.times[-1], 0.75)

    def test_exact_scheme_contracts(self):
        trajectory = evolve(cgmy(0.5), gaussian_field(), T=2.0, K=20)
        norms = [sobolev_norm(field, 0.0) for field in trajectory.fields]
        for before, after in zip(norms, norms[1:]):
            self.assertLessEqual(after, before * (1.0 + 1e-15))

    def _order(self, scheme):
        symbol = cgmy(1.5)
        g_hat = gaussian_payoff(GRID)
        exact = evolve(symbol, g_hat, T=0.5, K=1).final
        errors = [
            sobolev_norm(evolve(symbol, g_hat, T=0.5, K=steps, scheme=scheme).final - exact, 0.0)
            for steps in (100, 200)
        ]
        return math.log2(errors[0] / errors[1])

    def test_implicit_euler_order(self):
        self.assertAlmostEqual(self._order(Scheme.IMPLICIT_EULER), 1.0, delta=0.1)

    def test_crank_nicolson_order(self):
        self.assertAlmostEqual(self._order(Scheme.CRANK_NICOLSON), 2.0, delta=0.1)

    def test_constant_source(self):
        symbol = brownian()
        source = gaussian_field()
        trajectory = evolve(symbol, SpectralField.zeros(GRID), f_hat=source, T=1.0, K=4)
        z = symbol_on_grid(symbol, GRID)
        phi = np.full(z.shape, 1.0, dtype=complex)
        phi[z != 0] = -np.expm1(-z[z != 0]) / z[z != 0]
        np.testing.assert_allclose(trajectory.final.coefficients, phi * source.coefficients, rtol=0, atol=1e-12)

    def test_time_dependent_source(self):
        calls = []

        def source(t):
            calls.append(t)
            return gaussian_field(SMALL_GRID)

        evolve(brownian(), SpectralField.zeros(SMALL_GRID), f_hat=source, T=1.0, K=2,
               scheme=Scheme.CRANK_NICOLSON)
        self.assertEqual(calls, [0.0, 0.5, 0.5, 1.0])

    def test_source_on_other_grid(self):
        with self.assertRaises(GridMismatch):
            evolve(brownian(), gaussian_field(), f_hat=gaussian_field(SMALL_GRID), T=1.0, K=1)

    def test_crank_nicolson_reports_growth(self):
        growing = Symbol(
            family=Family.BROWNIAN,
            dimension=1,
            params=None,
            evaluator=lambda xi: -0.5 * xi[:, 0] ** 2 + 0j,
        )
        with self.assertRaises(UnstableScheme):
            evolve(growing, gaussian_field(SMALL_GRID), T=1.0, K=10, scheme=Scheme.CRANK_NICOLSON)

    def test_invalid_arguments(self):
        with self.assertRaises(InvalidParams):
            evolve(brownian(), gaussian_field(), T=0.0, K=1)
        with self.assertRaises(InvalidParams):
            evolve(brownian(), gaussian_field(), T=1.0, K=0)
        field = gaussian_field(SMALL_GRID)
        with self.assertRaises(InvalidParams):
            Trajectory(times=(0.0, 0.0), fields=(field, field), scheme=Scheme.EXACT)


class ConditionalExpectationTests(SimpleTestCase):
    def test_inversion_at_zero_time(self):
        x = np.linspace(-5.0, 5.0, 11)
        values = conditional_expectation(brownian(), gaussian_payoff(GRID), 0.0, x)
        np.testing.assert_allclose(values, gaussian_values(x), rtol=0, atol=1e-8)

    def test_heat_kernel(self):
        x = np.linspace(-10.0, 10.0, 201)
        values = conditional_expectation(brownian(), gaussian_payoff(GRID), 1.0, x)
        expected = np.exp(-x ** 2 / 4.0) / math.sqrt(2.0)
        self.assertLess(np.max(np.abs(values - expected)), 1e-6)

    def test_cauchy_convolution(self):
        # heavy tails alias over the spatial period, so a fine frequency spacing is used
        grid = FrequencyGrid(dimension=1, modes=2 ** 14, cutoff=32.0)
        symbol = make_symbol(CauchyParams(c=1.0, gamma=0.0))
        x = np.array([-2.0, 0.0, 0.5, 3.0])
        values = conditional_expectation(symbol, gaussian_payoff(grid), 1.0, x)
        for point, value in zip(x, values):
            def integrand(y):
                return gaussian_values(point + y) / (math.pi * (1.0 + y ** 2))

            edges = (-np.inf, -point - 12.0, -point + 12.0, np.inf)
            expected = sum(integrate.quad(integrand, a, b, epsabs=1e-13)[0] for a, b in zip(edges, edges[1:]))
            self.assertAlmostEqual(value, expected, delta=1e-5)

    def test_grid_refinement(self):
        x = np.linspace(-4.0, 4.0, 9)
        fine = FrequencyGrid(dimension=1, modes=8192, cutoff=128.0)
        coarse = conditional_expectation(cgmy(), gaussian_payoff(GRID, mean=0.3, scale=0.8), 0.5, x)
        refined = conditional_expectation(cgmy(), gaussian_payoff(fine, mean=0.3, scale=0.8), 0.5, x)
        self.assertLess(np.max(np.abs(coarse - refined)), 1e-6)

    def test_hermite_payoff(self):
        x = np.linspace(-3.0, 3.0, 13)
        values = conditional_expectation(brownian(), hermite_payoff(GRID, 3, mean=0.5, scale=1.2), 0.0, x)
        np.testing.assert_allclose(values, hermite_function(3, (x - 0.5) / 1.2), rtol=0, atol=1e-8)

    def test_hermite_is_one_dimensional(self):
        with self.assertRaises(InvalidParams):
            hermite_payoff(FrequencyGrid(2, 16, 4.0), 1)

    def test_fat_tail(self):
        with self.assertRaises(TailTooFat):
            conditional_expectation(brownian(), gaussian_payoff(GRID, scale=0.01), 0.0, [0.0])

    def test_negative_time(self):
        with self.assertRaises(InvalidParams):
            conditional_expectation(brownian(), gaussian_payoff(GRID), -1.0, [0.0])


class DensityTests(SimpleTestCase):
    def test_cauchy_at_center(self):
        grid = FrequencyGrid(dimension=1, modes=2 ** 14, cutoff=32.0)
        value = density(make_symbol(CauchyParams(c=1.0, gamma=0.0)), 1.0, [0.0], grid=grid)[0]
        self.assertAlmostEqual(value, 1.0 / math.pi, delta=1e-6)

    def test_brownian_at_center(self):
        value = density(brownian(), 1.0, [0.0], grid=GRID)[0]
        self.assertAlmostEqual(value, 1.0 / math.sqrt(2.0 * math.pi), delta=1e-12)

    def test_nig_matches_law(self):
        symbol = make_symbol(NIGParams(alpha=10.0, beta=3.0, delta=1.0, mu=0.0))
        x = np.linspace(-3.0, 3.0, 13)
        expected = stats.norminvgauss(a=10.0, b=3.0, loc=0.0, scale=1.0).pdf(x)
        np.testing.assert_allclose(density(symbol, 1.0, x, grid=GRID), expected, rtol=0, atol=1e-8)

    def test_window_integrates_to_one(self):
        symbol = make_symbol(NIGParams(alpha=10.0, beta=0.0, delta=1.0, mu=0.0))
        axis, values = density_on_window(symbol, 1.0, GRID)
        self.assertEqual(len(axis), GRID.modes)
        self.assertAlmostEqual(np.sum(values) * (axis[1] - axis[0]), 1.0, delta=1e-4)
        self.assertGreaterEqual(values.min(), -1e-6)
        peak = int(np.argmax(values))
        self.assertAlmostEqual(axis[peak], 0.0)

    def test_heavy_symbol_without_decay(self):
        with self.assertRaises(TailTooFat):
            density(make_symbol(StableParams(alpha=0.3, c=1.0, beta=0.0, tau=0.0)), 1.0, [0.0], grid=GRID)


class ExportTests(SimpleTestCase):
    def test_write_csv_with_header(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "density.csv")
            rows, fields = value_rows([0.0, 0.5], np.array([0.25, 0.125]))
            write_csv(path, rows, fields, header={"solver_modes": 4096})
            with open(path, encoding="utf-8") as f:
                lines = f.read().splitlines()
        self.assertEqual(lines, ["# solver_modes=4096", "x,value", "0.0,0.25", "0.5,0.125"])

    def test_trajectory_rows(self):
        grid = FrequencyGrid(dimension=1, modes=8, cutoff=4.0)
        trajectory = evolve(brownian(), gaussian_field(grid), T=1.0, K=4)
        rows, fields = trajectory_rows(trajectory, every=2)
        self.assertEqual(fields, ["t", "xi", "real", "imag"])
        self.assertEqual(len(rows), 3 * 8)
        self.assertEqual(sorted({row["t"] for row in rows}), [0.0, 0.5, 1.0])

    def test_complex_values_split(self):
        rows, fields = value_rows(np.array([1.0]), np.array([1.0 + 2.0j]))
        self.assertEqual(fields, ["x", "real", "imag"])
        self.assertEqual(rows[0], {"x": 1.0, "real": 1.0, "imag": 2.0})
