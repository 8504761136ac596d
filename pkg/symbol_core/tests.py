import math

import numpy as np
from django.test import SimpleTestCase
from rest_framework import serializers
from scipy import integrate, special

from levy_measure.densities import (
    cauchy_density,
    cgmy_density,
    nig_density,
    power_law_density,
    tabulated_density,
)
from levy_measure.quadrature import split_symmetric, symbol_parts_from_density
from symbol_core.constants import GROWTH_RADII, Truncation
from symbol_core.families import (
    BrownianParams,
    CauchyParams,
    CGMYParams,
    DensityParams,
    GHParams,
    NIGParams,
    StableParams,
    StudentTParams,
)
from symbol_core.serializers import params_from_record, record_from_params
from symbol_core.symbols import (
    char_fn,
    check_semistable_scaling,
    evaluate,
    make_symbol,
    stable_symbol_1d,
    sum_symbol,
)
from symbol_core.triplet import LevyTriplet, symbol_from_triplet
from symbol_core.utils import EvalOverflow, InvalidParams, log_bessel_k, log_bessel_k_large_order


def brownian(drift=0.0):
    return make_symbol(BrownianParams(sigma=1.0, drift=drift))


def cauchy():
    return make_symbol(CauchyParams(c=1.0, gamma=0.0))


class MakeSymbolTests(SimpleTestCase):
    def test_brownian(self):
        symbol = brownian()
        self.assertEqual(evaluate(symbol, 3.0), 4.5 + 0j)
        self.assertEqual(symbol.dimension, 1)
        self.assertFalse(symbol.has_jumps)

    def test_nig_constraint(self):
        with self.assertRaises(InvalidParams):
            make_symbol(NIGParams(alpha=1.0, beta=(2.0, 0.0), Delta=(1.0, 0.0, 0.0, 1.0)))

    def test_cgmy_y_bound(self):
        with self.assertRaises(InvalidParams) as ctx:
            make_symbol(CGMYParams(C=1.0, G=5.0, M=5.0, Y=2.3))
        self.assertIn("Y < 2", str(ctx.exception))

    def test_finite_variation_drift_needs_small_y(self):
        with self.assertRaises(InvalidParams):
            CGMYParams(Y=1.5, drift_convention="finite_variation")

    def test_finite_variation_drift_is_mean_jump(self):
        params = CGMYParams(C=1.0, G=2.0, M=4.0, Y=0.5)
        density = cgmy_density(params.C, params.G, params.M, params.Y)
        right, _ = integrate.quad(lambda x: x * float(density(x)), 0.0, np.inf, epsabs=1e-13, limit=200)
        left, _ = integrate.quad(lambda x: x * float(density(x)), -np.inf, 0.0, epsabs=1e-13, limit=200)
        self.assertAlmostEqual(params.drift, right + left, delta=1e-8)
        self.assertAlmostEqual(params.drift, math.sqrt(math.pi) * (0.5 - 1.0 / math.sqrt(2.0)), delta=1e-14)

    def test_unknown_record(self):
        with self.assertRaises(InvalidParams):
            make_symbol(object())


class EvaluateTests(SimpleTestCase):
    def test_cauchy(self):
        self.assertEqual(evaluate(cauchy(), 2.0), 2.0 + 0j)

    def test_nig(self):
        symbol = make_symbol(NIGParams(alpha=10.0, beta=0.0, delta=1.0, mu=0.0))
        value = evaluate(symbol, 1.0)
        self.assertAlmostEqual(value.real, math.sqrt(101.0) - 10.0, delta=1e-14)
        self.assertAlmostEqual(value.imag, 0.0, delta=1e-14)

    def test_batch_shape(self):
        values = evaluate(brownian(), np.array([[1.0, 2.0], [3.0, 4.0]]))
        self.assertEqual(values.shape, (2, 2))
        self.assertEqual(values[1, 1], 8.0 + 0j)

    def test_deterministic(self):
        symbol = make_symbol(CGMYParams(C=1.0, G=2.0, M=4.0, Y=1.5))
        xi = np.linspace(-40.0, 40.0, 81)
        np.testing.assert_array_equal(evaluate(symbol, xi), evaluate(symbol, xi))

    def test_student_t_large_frequency(self):
        symbol = make_symbol(StudentTParams(f=4.0, delta=1.0, mu=0.0))
        value = evaluate(symbol, 1e6)
        self.assertTrue(np.isfinite(value))
        self.assertAlmostEqual(value.real / 1e6, 1.0, delta=1e-4)
        self.assertEqual(evaluate(symbol, 0.0), 0j)

    def test_student_t_many_degrees_of_freedom(self):
        for f in (200.0, 400.0):
            with self.subTest(f=f):
                symbol = make_symbol(StudentTParams(f=f, delta=1.0, mu=0.0))
                # A(u) -> u^2 / (2 (f - 2)) as u -> 0
                self.assertAlmostEqual(evaluate(symbol, 0.01).real * 2.0 * (f - 2.0) / 1e-4, 1.0, delta=1e-6)
                value = evaluate(symbol, 1.0)
                self.assertAlmostEqual(value.real * 2.0 * (f - 2.0), 1.0, delta=0.01)
                self.assertTrue(np.isfinite(evaluate(symbol, 1e6)))

    def test_large_order_bessel_matches_scaled_kve(self):
        nu = 150.0
        z = np.array([2.0, 12.0, 13.0, 40.0, 300.0])
        expected = np.log(special.kve(nu, z)) - z
        np.testing.assert_allclose(log_bessel_k_large_order(nu, z), expected, rtol=1e-10, atol=0.0)
        np.testing.assert_allclose(log_bessel_k(nu, z), expected, rtol=0.0, atol=0.0)

    def test_overflow(self):
        with self.assertRaises(EvalOverflow):
            evaluate(brownian(), 1e200)

    def test_hermitian_and_real_part(self):
        rng = np.random.default_rng(7)
        records = [
            BrownianParams(sigma=(2.0, 0.5, 0.5, 1.0), drift=(0.3, -0.1)),
            NIGParams(alpha=3.0, beta=(1.0, 0.5), delta=0.7, mu=(0.1, 0.2), Delta=(1.0, 0.2, 0.2, 1.0)),
            CauchyParams(c=0.5, gamma=(1.0, -1.0)),
            StudentTParams(f=3.0, delta=2.0, mu=0.3),
            CGMYParams(C=1.0, G=2.0, M=4.0, Y=0.5),
            CGMYParams(C=1.0, G=2.0, M=4.0, Y=1.0),
            CGMYParams(C=1.0, G=2.0, M=4.0, Y=0.0),
            StableParams(alpha=1.4, c=1.0, beta=0.6, tau=0.2),
            StableParams(alpha=1.0, c=1.0, beta=-0.4, tau=0.0),
        ]
        for record in records:
            with self.subTest(record=record):
                symbol = make_symbol(record)
                xi = rng.uniform(-50.0, 50.0, size=(1000, symbol.dimension))
                values = symbol.evaluator(xi)
                mirrored = symbol.evaluator(-xi)
                gap = np.abs(values - np.conj(mirrored))
                self.assertTrue(np.all(gap <= 1e-10 * (1.0 + np.abs(values))))
                radius_sq = np.sum(xi ** 2, axis=1)
                self.assertTrue(np.all(values.real >= -1e-10 * (1.0 + radius_sq)))

    def test_growth_constant(self):
        symbol = make_symbol(CGMYParams(C=1.0, G=5.0, M=5.0, Y=1.5))
        values = np.abs(evaluate(symbol, GROWTH_RADII))
        self.assertTrue(np.all(values <= symbol.growth_constant * (1.0 + GROWTH_RADII) ** 2 * (1.0 + 1e-12)))
        self.assertAlmostEqual(brownian().growth_constant, 0.5, delta=1e-5)


class ClosedFormAgainstQuadratureTests(SimpleTestCase):
    frequencies = (0.5, 3.0, 10.0, 40.0, 100.0)

    def assert_matches(self, symbol, density, mean=0.0):
        split = split_symmetric(density)
        for u in self.frequencies:
            a_fs, a_fas = symbol_parts_from_density(split, u)
            expected = evaluate(symbol, u)
            got = a_fs + a_fas + 1j * mean * u
            self.assertLess(abs(got - expected), 1e-6 * abs(expected), msg=f"u={u}")

    def test_cgmy_symmetric(self):
        symbol = make_symbol(CGMYParams(C=1.0, G=5.0, M=5.0, Y=1.5))
        self.assert_matches(symbol, cgmy_density(1.0, 5.0, 5.0, 1.5))

    def test_cgmy_finite_variation(self):
        params = CGMYParams(C=1.0, G=2.0, M=4.0, Y=0.5)
        self.assert_matches(make_symbol(params), cgmy_density(1.0, 2.0, 4.0, 0.5), mean=params.drift)

    def test_nig(self):
        symbol = make_symbol(NIGParams(alpha=10.0, beta=0.0, delta=1.0, mu=0.0))
        self.assert_matches(symbol, nig_density(10.0, 0.0, 1.0))

    def test_skewed_nig(self):
        symbol = make_symbol(NIGParams(alpha=10.0, beta=3.0, delta=1.0, mu=0.0))
        mean = 3.0 / math.sqrt(91.0)
        self.assert_matches(symbol, nig_density(10.0, 3.0, 1.0), mean=mean)


class CharFnTests(SimpleTestCase):
    def test_values(self):
        self.assertAlmostEqual(char_fn(make_symbol(CauchyParams(c=1.0)), 2.0, 1.0).real, math.exp(-2.0), delta=1e-15)
        self.assertAlmostEqual(char_fn(brownian(), 1.0, 2.0).real, math.exp(-2.0), delta=1e-15)
        self.assertAlmostEqual(abs(char_fn(make_symbol(CGMYParams(Y=1.5)), 1.0, 0.0) - 1.0), 0.0, delta=1e-14)

    def test_semigroup(self):
        symbol = make_symbol(NIGParams(alpha=2.0, beta=0.5, delta=1.0, mu=0.2))
        xi = np.linspace(-20.0, 20.0, 41)
        joint = char_fn(symbol, 0.7, xi)
        split = char_fn(symbol, 0.3, xi) * char_fn(symbol, 0.4, xi)
        np.testing.assert_allclose(joint, split, rtol=1e-12, atol=0.0)
        self.assertTrue(np.all(np.abs(joint) <= 1.0 + 1e-15))

    def test_needs_positive_time(self):
        with self.assertRaises(InvalidParams):
            char_fn(brownian(), 0.0, 1.0)


class SemistableScalingTests(SimpleTestCase):
    grid = np.linspace(-10.0, 10.0, 41)

    def test_strictly_stable(self):
        symbol = make_symbol(StableParams(alpha=0.7, c=1.0, beta=0.0, tau=0.0))
        residual = check_semistable_scaling(symbol, 2.0, 2.0 ** (1.0 / 0.7), 0.0, self.grid)
        self.assertLessEqual(residual, 1e-12)

    def test_brownian_with_drift(self):
        residual = check_semistable_scaling(brownian(0.3), 4.0, 2.0, 0.6, self.grid)
        self.assertLessEqual(residual, 1e-12)

    def test_cauchy(self):
        self.assertLessEqual(check_semistable_scaling(cauchy(), 3.0, 3.0, 0.0, self.grid), 1e-12)

    def test_empty_grid(self):
        with self.assertRaises(InvalidParams):
            check_semistable_scaling(cauchy(), 1.0, 1.0, 0.0, [])


class StableSymbolTests(SimpleTestCase):
    def test_strict_one_stable(self):
        symbol = stable_symbol_1d(StableParams(alpha=1.0, c=2.0, beta=0.0, tau=0.5))
        value = evaluate(symbol, 3.0)
        self.assertAlmostEqual(value.real, 6.0, delta=1e-14)
        self.assertAlmostEqual(value.imag, 1.5, delta=1e-14)

    def test_skewed_one_stable(self):
        value = evaluate(stable_symbol_1d(StableParams(alpha=1.0, c=1.0, beta=1.0, tau=0.0)), math.e)
        self.assertAlmostEqual(value.real, math.e, delta=1e-14)
        self.assertAlmostEqual(value.imag, -math.e * 2.0 / math.pi, delta=1e-14)

    def test_half_stable(self):
        symbol = stable_symbol_1d(StableParams(alpha=0.5, c=1.0, beta=0.0, tau=0.0))
        self.assertAlmostEqual(evaluate(symbol, 4.0).real, 2.0, delta=1e-14)
        self.assertEqual(evaluate(symbol, 0.0), 0j)

    def test_rejects_other_records(self):
        with self.assertRaises(InvalidParams):
            stable_symbol_1d(CauchyParams())
        with self.assertRaises(InvalidParams):
            StableParams(alpha=2.5)


class TripletTests(SimpleTestCase):
    def test_sigma_must_be_symmetric(self):
        with self.assertRaises(InvalidParams):
            LevyTriplet(dimension=2, drift=(0.0, 0.0), sigma=(1.0, 0.5, 0.0, 1.0))

    def test_without_jumps_is_brownian(self):
        symbol = symbol_from_triplet(LevyTriplet(dimension=1, drift=(0.0,), sigma=(1.0,)))
        self.assertEqual(evaluate(symbol, 3.0), 4.5 + 0j)

    def test_cauchy_density(self):
        triplet = LevyTriplet(dimension=1, drift=(0.0,), sigma=(0.0,), levy_measure=cauchy_density(1.0))
        symbol = symbol_from_triplet(triplet)
        self.assertFalse(symbol.closed_form)
        self.assertAlmostEqual(evaluate(symbol, 3.0).real, 3.0, delta=1e-8)

    def test_identity_truncation_needs_first_moment(self):
        heavy = power_law_density(1.0, 0.5, skew=0.5)
        with self.assertRaises(InvalidParams):
            LevyTriplet(dimension=1, drift=(0.0,), sigma=(0.0,), levy_measure=heavy)
        triplet = LevyTriplet(
            dimension=1, drift=(0.0,), sigma=(0.0,), levy_measure=heavy, truncation=Truncation.UNIT_BALL
        )
        self.assertIs(triplet.truncation, Truncation.UNIT_BALL)


def mirrored_table(density, x_min, x_max, count):
    """(x, f) columns of ``density`` at ``count`` log-spaced |x| on both sides."""
    x = np.logspace(math.log10(x_min), math.log10(x_max), count)
    f = density(x)
    return tuple(np.concatenate([-x[::-1], x])), tuple(np.concatenate([f[::-1], f]))


class TableBackedSymbolTests(SimpleTestCase):
    def test_gh_from_nig_table(self):
        table_x, table_f = mirrored_table(nig_density(3.0, 0.0, 1.0), 1e-2, 20.0, 60)
        symbol = make_symbol(GHParams(C1=1.0 / math.pi, table_x=table_x, table_f=table_f))
        self.assertEqual(symbol.family.value, "gh")
        self.assertFalse(symbol.closed_form)
        self.assertTrue(np.isfinite(symbol.growth_constant))
        reference = make_symbol(NIGParams(alpha=3.0, beta=0.0, delta=1.0, mu=0.0))
        for u in (0.01, 0.0304699, 0.5, 5.0, 50.0):
            with self.subTest(u=u):
                value = evaluate(symbol, u)
                self.assertAlmostEqual(value.real / evaluate(reference, u).real, 1.0, delta=0.02)
                self.assertEqual(value.imag, 0.0)

    def test_tabulated_cgmy_density(self):
        table_x, table_f = mirrored_table(cgmy_density(1.0, 5.0, 5.0, 1.5), 1e-4, 10.0, 80)
        density = tabulated_density(table_x, table_f, hint_Y=1.5, hint_C=1.0)
        self.assertEqual(density.breakpoints[0], table_x[len(table_x) // 2])
        self.assertEqual(len(density.breakpoints), 80)
        symbol = make_symbol(DensityParams(density=density))
        reference = make_symbol(CGMYParams(C=1.0, G=5.0, M=5.0, Y=1.5))
        for u in (0.01, 0.5, 5.0, 50.0):
            with self.subTest(u=u):
                ratio = evaluate(symbol, u).real / evaluate(reference, u).real
                self.assertAlmostEqual(ratio, 1.0, delta=0.02)

    def test_small_frequencies_meet_the_error_budget(self):
        table_x, table_f = mirrored_table(cgmy_density(1.0, 5.0, 5.0, 1.5), 1e-2, 10.0, 200)
        split = split_symmetric(tabulated_density(table_x, table_f, hint_Y=1.5, hint_C=1.0))
        for u in (0.01, 0.0304699, 0.064):
            with self.subTest(u=u):
                a_fs, a_fas = symbol_parts_from_density(split, u)
                self.assertGreater(a_fs, 0.0)
                self.assertEqual(a_fas, 0j)


class SumSymbolTests(SimpleTestCase):
    def test_adds_symbols(self):
        total = sum_symbol(brownian(), cauchy())
        self.assertEqual(evaluate(total, 2.0), 4.0 + 0j)
        self.assertEqual(total.label, "brownian+cauchy")

    def test_dimension_mismatch(self):
        planar = make_symbol(CauchyParams(c=1.0, gamma=(0.0, 0.0)))
        with self.assertRaises(InvalidParams):
            sum_symbol(brownian(), planar)


class FamilyRecordTests(SimpleTestCase):
    def test_round_trip(self):
        for params in (
            CGMYParams(C=1.0, G=5.0, M=5.0, Y=1.5),
            BrownianParams(sigma=1.0, drift=0.2),
            NIGParams(alpha=10.0, beta=3.0, delta=1.0, mu=0.0),
            StableParams(alpha=0.7),
        ):
            with self.subTest(params=params):
                self.assertEqual(params_from_record(record_from_params(params)), params)

    def test_text_record(self):
        params = params_from_record({"family": "brownian", "sigma": "2,0.5,0.5,1", "drift": "0,1"})
        self.assertEqual(params.dimension, 2)
        self.assertEqual(params.sigma, (2.0, 0.5, 0.5, 1.0))

    def test_invalid_y(self):
        with self.assertRaises(serializers.ValidationError) as ctx:
            params_from_record({"family": "cgmy", "C": "1", "G": "5", "M": "5", "Y": "2.5"})
        self.assertIn("Y < 2", str(ctx.exception.detail))

    def test_unknown_family(self):
        with self.assertRaises(serializers.ValidationError):
            params_from_record({"family": "merton"})
