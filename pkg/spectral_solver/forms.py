"""
Sobolev norms, the bilinear form of a symbol and numerical checks of its
continuity and Garding inequalities.

Everything is computed mode by mode in frequency space:

    ||u||_s^2 = sum |u_hat|^2 (1 + |xi|)^(2s) dxi^d
    a(u, v)   = sum A(xi) u_hat(xi) conj(v_hat(xi)) dxi^d

The norms are frequency-side integrals; ``||u||_0`` is ``(2 pi)^(d/2)`` times
the spatial L2 norm.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
from django.conf import settings

from index_lab.fitting import loglog_slope, ray_profiles
from index_lab.grids import GridSpec
from spectral_solver.grids import FrequencyGrid, GridMismatch, SpectralField, default_grid, require_same_grid
from symbol_core.utils import InvalidParams

logger = logging.getLogger(__name__)

C3_CEILING = 1e6
TREND_SLACK = 0.05
GARDING_SHARE = 0.5
BAND_FRACTION = 0.5
BOUND_RTOL = 1e-9
MARGIN_RTOL = 1e-10
RATIO_LOGLOG_SLOPE = 0.5


def _fsum(values) -> float:
    return math.fsum(np.asarray(values, dtype=float).ravel())


def symbol_on_grid(symbol, grid: FrequencyGrid) -> np.ndarray:
    if symbol.dimension != grid.dimension:
        raise GridMismatch(f"symbol {symbol.label} has d={symbol.dimension}, grid has d={grid.dimension}")
    return np.asarray(symbol(grid.frequencies()), dtype=complex).reshape(grid.shape)


def sobolev_norm_sq(field: SpectralField, s: float) -> float:
    weights = (1.0 + field.grid.magnitudes()) ** (2.0 * s)
    return _fsum(np.abs(field.coefficients) ** 2 * weights) * field.grid.cell


def sobolev_norm(field: SpectralField, s: float) -> float:
    """||u||_s on the grid (Riemann sum of the frequency integral)."""
    return math.sqrt(sobolev_norm_sq(field, s))


def weighted_norm(symbol, field: SpectralField) -> float:
    """Norm of the space weighted by 1 + Re A(xi)."""
    weights = 1.0 + symbol_on_grid(symbol, field.grid).real
    return math.sqrt(_fsum(np.abs(field.coefficients) ** 2 * weights) * field.grid.cell)


def bilinear_form(symbol, u: SpectralField, v: SpectralField) -> complex:
    grid = require_same_grid(u, v)
    terms = symbol_on_grid(symbol, grid) * u.coefficients * np.conj(v.coefficients)
    return complex(_fsum(terms.real), _fsum(terms.imag)) * grid.cell


def apply_operator(symbol, field: SpectralField) -> SpectralField:
    """The generator acting as a Fourier multiplier: (Au)^ = A(xi) u_hat."""
    return field.with_coefficients(symbol_on_grid(symbol, field.grid) * field.coefficients)


def random_fields(grid: FrequencyGrid, count: int, seed: int = 0, band: float = None) -> np.ndarray:
    """
    ``count`` conj-symmetric fields with i.i.d. standard complex Gaussian
    coefficients on ``|xi| <= band``; shape ``(count, *grid.shape)``.
    """
    band = grid.cutoff * BAND_FRACTION if band is None else band
    rng = np.random.default_rng(seed)
    shape = (int(count),) + grid.shape
    draws = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)
    draws = draws * (grid.magnitudes() <= band)
    axes = tuple(range(1, grid.dimension + 1))
    mirrored = np.roll(np.flip(draws, axis=axes), 1, axis=axes)
    return 0.5 * (draws + np.conj(mirrored))


def _batch_sum(values: np.ndarray, grid: FrequencyGrid) -> np.ndarray:
    return np.sum(values, axis=tuple(range(1, grid.dimension + 1))) * grid.cell


@dataclass(frozen=True)
class OperatorBound:
    constant: float
    worst_ratio: float
    trials: int

    @property
    def holds(self) -> bool:
        return self.worst_ratio <= self.constant * (1.0 + BOUND_RTOL)


def operator_norm_bound(symbol, s: float, alpha: float, grid: FrequencyGrid = None,
                        trials: int = 100, seed: int = 0) -> OperatorBound:
    """sup |A|/(1+|xi|)^alpha on the grid against ||Au||_{s-alpha}/||u||_s on random fields."""
    grid = grid or default_grid(symbol.dimension)
    values = symbol_on_grid(symbol, grid)
    lift = 1.0 + grid.magnitudes()
    constant = float(np.max(np.abs(values) / lift ** alpha))
    fields = random_fields(grid, trials, seed)
    image = _batch_sum(np.abs(values * fields) ** 2 * lift ** (2.0 * (s - alpha)), grid)
    source = _batch_sum(np.abs(fields) ** 2 * lift ** (2.0 * s), grid)
    worst = float(np.max(np.sqrt(image / source)))
    logger.debug("operator bound for %s: C=%.6g worst=%.6g", symbol.label, constant, worst)
    return OperatorBound(constant=constant, worst_ratio=worst, trials=int(trials))


def _profile_trend(radii, ratio, window, worst) -> float:
    """Extreme per-direction log-log slope of a positive ratio over the window."""
    slopes = []
    for row in ratio:
        picked = row[window]
        if np.any(picked <= 0.0) or not np.all(np.isfinite(picked)):
            return -math.inf if worst is min else math.inf
        slopes.append(loglog_slope(radii[window], picked)[0])
    return float(worst(slopes))


@dataclass(frozen=True)
class ImaginaryDomination:
    constant: float
    trend: float

    @property
    def continuity_constant(self) -> float:
        return 1.0 + self.constant

    @property
    def bounded(self) -> bool:
        return self.trend <= RATIO_LOGLOG_SLOPE


def check_imaginary_domination(symbol, grid: FrequencyGrid = None, rays: GridSpec = None) -> ImaginaryDomination:
    """
    Fitted c with |Im A| <= c (1 + Re A).

    The constant is the largest ratio over the solver grid and the asymptotic
    rays; the trend is the growth of the ratio against log log r, so a
    logarithmic blow-up like the skewed 1-stable one is flagged.
    """
    grid = grid or default_grid(symbol.dimension)
    rays = rays or GridSpec()
    values = symbol_on_grid(symbol, grid)
    ratio_grid = np.abs(values.imag) / (1.0 + values.real)
    radii, _, profile = ray_profiles(symbol, rays)
    ratio_rays = np.abs(profile.imag) / (1.0 + profile.real)
    constant = float(max(np.max(ratio_grid), np.max(ratio_rays)))

    window = rays.window()
    worst = np.max(ratio_rays, axis=0)[window]
    if np.all(worst <= 0.0):
        trend = 0.0
    elif np.any(worst <= 0.0):
        trend = math.inf
    else:
        trend = loglog_slope(np.log(radii[window]), worst)[0]
    return ImaginaryDomination(constant=constant, trend=float(trend))


def elementary_shift(C1: float, C2: float, C3: float, alpha: float, beta: float) -> float:
    """
    Smallest C4 >= 0 with C1 x^alpha - C2 x^beta >= C3 x^alpha - C4 for all x >= 0.

    The difference (C1 - C3) x^alpha - C2 x^beta is minimal at
    x0 = (beta C2 / (alpha (C1 - C3)))^(1 / (alpha - beta)).
    """
    if not C1 > C3 >= 0.0 or C2 < 0.0:
        raise InvalidParams(f"elementary_shift needs C1 > C3 >= 0 and C2 >= 0 (got {C1}, {C2}, {C3})")
    if not alpha > beta >= 0.0:
        raise InvalidParams(f"elementary_shift needs alpha > beta >= 0 (got {alpha}, {beta})")
    x0 = (beta * C2 / (alpha * (C1 - C3))) ** (1.0 / (alpha - beta))
    lowest = (C1 - C3) * x0 ** alpha - C2 * x0 ** beta
    return max(0.0, -lowest)


@dataclass(frozen=True)
class FormReport:
    alpha: float
    trials: int
    seed: int
    continuity_constant: float
    continuity_bound: float
    continuity_trend: float
    garding_c2: float
    garding_c3: float
    garding_trend: float
    garding_margin: float
    continuity_passed: bool
    garding_passed: bool

    @property
    def passed(self) -> bool:
        return self.continuity_passed and self.garding_passed


def verify_form_inequalities(symbol, alpha: float, trials: int = None, grid: FrequencyGrid = None,
                             seed: int = 0, rays: GridSpec = None) -> FormReport:
    """
    Check |a(u, v)| <= c ||u||_{alpha/2} ||v||_{alpha/2} and
    Re a(u, u) >= c2 ||u||_{alpha/2}^2 - c3 ||u||_0^2 on seeded random fields.

    The form is diagonal in frequency, so (c2, c3) are fitted per mode:
    c2 is a share of the smallest ratio Re A / (1+|xi|)^alpha over the upper
    half of the grid and the asymptotic rays, c3 absorbs the low modes.
    A finite grid cannot see c2 drift to zero, so both ratios must also keep a
    flat log-log trend on the ray window.
    """
    if not 0.0 < alpha <= 2.0:
        raise InvalidParams(f"verify_form_inequalities needs alpha in (0, 2] (got {alpha})")
    trials = int(trials or settings.LEVYSOBOLEV_DEFAULTS["form_trials"])
    grid = grid or default_grid(symbol.dimension)
    rays = rays or GridSpec()

    values = symbol_on_grid(symbol, grid)
    magnitudes = grid.magnitudes()
    weights = (1.0 + magnitudes) ** alpha

    radii, _, profile = ray_profiles(symbol, rays)
    window = rays.window()
    ray_weights = (1.0 + radii) ** alpha
    continuity_trend = _profile_trend(radii, np.abs(profile) / ray_weights, window, max)
    garding_trend = _profile_trend(radii, profile.real / ray_weights, window, min)

    fields = random_fields(grid, trials, seed)
    partners = random_fields(grid, trials, seed + 1)
    norm_u = _batch_sum(np.abs(fields) ** 2 * weights, grid)
    norm_v = _batch_sum(np.abs(partners) ** 2 * weights, grid)
    cross = _batch_sum(values * fields * np.conj(partners), grid)
    continuity_constant = float(np.max(np.abs(cross) / np.sqrt(norm_u * norm_v)))
    continuity_bound = float(np.max(np.abs(values) / weights))

    upper = magnitudes >= 0.5 * grid.cutoff
    ratios = np.concatenate([(values.real / weights)[upper], (profile.real / ray_weights)[:, window].ravel()])
    c2 = GARDING_SHARE * float(np.min(ratios))
    c3 = max(0.0, float(np.max(c2 * weights - values.real)))
    energy = _batch_sum(values.real * np.abs(fields) ** 2, grid)
    mass = _batch_sum(np.abs(fields) ** 2, grid)
    margin = float(np.min((energy - (c2 * norm_u - c3 * mass)) / norm_u))

    continuity_passed = bool(
        math.isfinite(continuity_constant)
        and continuity_constant <= continuity_bound * (1.0 + BOUND_RTOL)
        and continuity_trend <= TREND_SLACK
    )
    garding_passed = bool(
        c2 > 0.0 and c3 <= C3_CEILING and margin >= -MARGIN_RTOL and garding_trend >= -TREND_SLACK
    )
    logger.debug(
        "form check %s alpha=%s: c=%.4g bound=%.4g c2=%.4g c3=%.4g trends=(%.3g, %.3g)",
        symbol.label, alpha, continuity_constant, continuity_bound, c2, c3, continuity_trend, garding_trend,
    )
    if not garding_passed:
        logger.info("garding inequality fails for %s at alpha=%s", symbol.label, alpha)
    return FormReport(
        alpha=float(alpha),
        trials=trials,
        seed=int(seed),
        continuity_constant=continuity_constant,
        continuity_bound=continuity_bound,
        continuity_trend=continuity_trend,
        garding_c2=c2,
        garding_c3=c3,
        garding_trend=garding_trend,
        garding_margin=margin,
        continuity_passed=continuity_passed,
        garding_passed=garding_passed,
    )
