"""
Sobolev index estimation from symbol samples.

Both defining conditions are asymptotic, so slopes are read off the upper half
(in log scale) of the radial grid. Continuity takes the steepest direction,
Garding the flattest.
"""
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from index_lab.checks import index_verdicts
from index_lab.fitting import clean, loglog_slope, ray_profiles
from index_lab.grids import GridSpec
from levy_measure.indices import FitUnstable, Inconsistent, estimate_bg_index, estimate_gamma_index
from levy_measure.quadrature import DivergentIntegral, NotOneDimensional, QuadratureFailure
from symbol_core.utils import default

logger = logging.getLogger(__name__)

DEGENERATE_FLOOR = 1e-14
# A symbol growing like log r has window slope * log(r_mid) close to 1.
LOG_GROWTH_PRODUCT = 1.5
LOG_GROWTH_DECAY = 1.25
# |A| / Re A growing like (log r)^k with k above this is not polynomially bounded.
RATIO_LOGLOG_SLOPE = 0.5
CROSSOVER_FRACTION = 0.5
MIN_FIT_POINTS = 4
ROUNDOFF_RESIDUAL = 1e-9
INDEX_CEILING = 2.0 + 1e-6


@dataclass(frozen=True)
class IndexReport:
    alpha_cont: Optional[float]
    alpha_gard: Optional[float]
    sobolev_index: Optional[float]
    beta: Optional[float] = None
    gamma: Optional[float] = None
    verdicts: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    @property
    def has_index(self) -> bool:
        return self.sobolev_index is not None


def _positive_fit(radii, values, mask):
    keep = mask & (values > 0.0)
    if np.count_nonzero(keep) < MIN_FIT_POINTS:
        return None
    return loglog_slope(radii[keep], values[keep])


def fit_continuity_exponent(symbol, grid: GridSpec = None):
    """max over directions of the slope of log|A(r e)| against log r on the fit window."""
    grid = grid or GridSpec()
    radii, _, profile = ray_profiles(symbol, grid)
    return _continuity(radii, profile, grid, symbol.label)


def _continuity(radii, profile, grid, label):
    magnitude = np.abs(profile)
    if np.all(magnitude < DEGENERATE_FLOOR):
        raise DegenerateSymbol(f"fit_continuity_exponent: |A| < {DEGENERATE_FLOOR} on the whole grid")
    window = grid.window()
    lower = ~window
    lower[np.argmax(window)] = True

    slopes, r_squared, residuals, lower_slopes = [], [], [], []
    for row in magnitude:
        fit = _positive_fit(radii, row, window)
        if fit is None:
            slopes.append(float("-inf"))
            r_squared.append(0.0)
            residuals.append(float("inf"))
        else:
            slopes.append(fit[0])
            r_squared.append(fit[2])
            residuals.append(fit[3])
        low = _positive_fit(radii, row, lower)
        lower_slopes.append(low[0] if low is not None else float("nan"))
    steepest = int(np.argmax(slopes))
    alpha = float(slopes[steepest])

    log_mid = math.log(math.sqrt(grid.split_radius * grid.r_max))
    lower_slope = lower_slopes[steepest]
    log_like = (
        alpha * log_mid < LOG_GROWTH_PRODUCT
        and np.isfinite(lower_slope)
        and lower_slope >= LOG_GROWTH_DECAY * alpha
    )
    sub_polynomial = bool(alpha < default("subpolynomial_slope") or log_like)
    weights = (1.0 + radii ** 2) ** (alpha / 2.0)
    diagnostics = clean({
        "slopes": slopes,
        "r_squared": r_squared,
        "residual_max": max(residuals),
        "lower_slopes": lower_slopes,
        "sub_polynomial": sub_polynomial,
        "constant": float(np.max(magnitude / weights[None, :])),
        "window": [grid.split_radius, grid.r_max],
    })
    logger.debug("continuity fit for %s: %.4f (sub-polynomial %s)", label, alpha, sub_polynomial)
    return alpha, diagnostics


def _crossover(radii, values, slope, window):
    """Smallest radius beyond which Re A stays above half the fitted power law."""
    level = np.median(values[window] / radii[window] ** slope)
    ok = values >= CROSSOVER_FRACTION * level * radii ** slope
    bad = np.nonzero(~ok)[0]
    start = 0 if bad.size == 0 else bad[-1] + 1
    return start, float(level)


def _garding_direction(radii, row, window):
    fit = _positive_fit(radii, row, window)
    if fit is None:
        return None
    start, _ = _crossover(radii, row, fit[0], window)
    if start >= len(radii):
        return None
    kept = window.copy()
    kept[:start] = False
    refit = _positive_fit(radii, row, kept)
    if refit is None:
        return None
    slope = refit[0]
    constant = float(np.min(row[kept] / radii[kept] ** slope))
    return {
        "slope": refit[0],
        "r_squared": refit[2],
        "residual": refit[3],
        "crossover": float(radii[start]),
        "constant": constant,
    }


def fit_garding_exponent(symbol, grid: GridSpec = None):
    """min over directions of the slope of log Re A(r e) against log r past the crossover."""
    grid = grid or GridSpec()
    radii, _, profile = ray_profiles(symbol, grid)
    return _garding(radii, profile, grid, symbol.label)


def _garding(radii, profile, grid, label):
    window = grid.window()
    fits = [_garding_direction(radii, row, window) for row in profile.real]
    if any(fit is None for fit in fits):
        raise NonpositiveRealPart("fit_garding_exponent: Re A <= 0 on the fit range")
    flattest = int(np.argmin([fit["slope"] for fit in fits]))
    alpha = float(fits[flattest]["slope"])
    diagnostics = clean({
        "slopes": [fit["slope"] for fit in fits],
        "r_squared": [fit["r_squared"] for fit in fits],
        "residual_max": max(fit["residual"] for fit in fits),
        "crossover": max(fit["crossover"] for fit in fits),
        "constant": min(fit["constant"] for fit in fits),
        "window": [grid.split_radius, grid.r_max],
    })
    logger.debug("garding fit for %s: %.4f", label, alpha)
    return alpha, diagnostics


def _lower_order_exponent(radii, real_part, alpha, window):
    """
    Growth exponent of the deficit K r^alpha - Re A below the fit window.

    K is the least-squares level of Re A / r^alpha on the window. None when Re A
    never drops below the power law by more than roundoff.
    """
    upper = window & (real_part > 0.0)
    if not np.any(upper):
        return None
    level = np.exp(np.mean(np.log(real_part[upper]) - alpha * np.log(radii[upper])))
    model = level * radii ** alpha
    deficit = model - real_part
    lower = ~window & (deficit > ROUNDOFF_RESIDUAL * model)
    if np.count_nonzero(lower) < MIN_FIT_POINTS:
        return None
    return loglog_slope(radii[lower], deficit[lower])[0]


def _ratio_growth(radii, profile, window):
    """Largest slope of log(|A| / Re A) against log log r."""
    worst = 0.0
    for row in profile:
        keep = window & (row.real > 0.0)
        if np.count_nonzero(keep) < MIN_FIT_POINTS:
            continue
        ratio = np.abs(row[keep]) / row.real[keep]
        slope = loglog_slope(np.log(radii[keep]), ratio)[0]
        if np.isfinite(slope):
            worst = max(worst, slope)
    return worst


def sobolev_index(symbol, grid: GridSpec = None, tol: float = None) -> IndexReport:
    """Combine both fits into an index verdict; failures give a report without an index."""
    tol = default("index_tol") if tol is None else tol
    grid = grid or GridSpec()
    radii, _, profile = ray_profiles(symbol, grid)
    diagnostics = {"tol": tol}
    alpha_cont = alpha_gard = None
    try:
        alpha_cont, diagnostics["continuity"] = _continuity(radii, profile, grid, symbol.label)
        alpha_gard, diagnostics["garding"] = _garding(radii, profile, grid, symbol.label)
    except (DegenerateSymbol, NonpositiveRealPart) as exc:
        diagnostics["reason"] = str(exc)

    index = None
    if alpha_cont is not None and alpha_gard is not None:
        window = grid.window()
        lower_orders = [
            _lower_order_exponent(radii, row, alpha_gard, window) for row in profile.real
        ]
        finite = [value for value in lower_orders if value is not None]
        beta_lower = max(finite) if finite else None
        ratio_slope = _ratio_growth(radii, profile, window)
        checks = {
            "polynomial_growth": not diagnostics["continuity"]["sub_polynomial"],
            "bounded_ratio": ratio_slope <= RATIO_LOGLOG_SLOPE,
            "exponents_agree": abs(alpha_cont - alpha_gard) <= tol,
            "garding_in_range": 0.0 < alpha_gard <= INDEX_CEILING,
            "lower_order_below": beta_lower is None or beta_lower < alpha_gard,
        }
        diagnostics["lower_order_exponent"] = beta_lower
        diagnostics["ratio_loglog_slope"] = ratio_slope
        diagnostics["checks"] = checks
        if all(checks.values()):
            index = min(alpha_gard, 2.0)

    beta = gamma = None
    if symbol.levy_density is not None:
        try:
            beta_fit = estimate_bg_index(symbol.levy_density)
            gamma_fit = estimate_gamma_index(symbol.levy_density)
            beta, gamma = beta_fit.value, gamma_fit.value
            diagnostics["beta_bisection"] = beta_fit.confirmation
            diagnostics["gamma_r_squared"] = gamma_fit.r_squared
        except (FitUnstable, Inconsistent, DivergentIntegral, NotOneDimensional, QuadratureFailure) as exc:
            diagnostics["jump_index_error"] = str(exc)
    elif not symbol.has_jumps:
        beta = gamma = 0.0

    report = IndexReport(
        alpha_cont=alpha_cont,
        alpha_gard=alpha_gard,
        sobolev_index=index,
        beta=beta,
        gamma=gamma,
        verdicts={},
        diagnostics=clean(diagnostics),
    )
    report = replace(report, verdicts=clean(index_verdicts(report)))
    logger.info("sobolev index for %s: %s", symbol.label, index)
    return report


# Custom exceptions
class DegenerateSymbol(Exception):
    pass


class NonpositiveRealPart(Exception):
    pass
