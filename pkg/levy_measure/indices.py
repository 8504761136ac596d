"""Jump-activity indices of a one-dimensional Levy density."""
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from levy_measure.quadrature import (
    _log_quad,
    decade_partials,
    looks_divergent,
    split_symmetric,
)
from symbol_core.utils import default

logger = logging.getLogger(__name__)

BG_DECADES = 15
BG_BISECTIONS = 14
BG_AGREEMENT = 0.1
GAMMA_POINTS = 26
GAMMA_DEPTH = 1e-14
MIN_R_SQUARED = 0.99


@dataclass(frozen=True)
class JumpIndexEstimate:
    value: float
    slope: float
    r_squared: float
    confirmation: float = float("nan")


def log_log_fit(x, y):
    """Least-squares slope of log y against log x; flat data count as a perfect fit."""
    lx, ly = np.log(x), np.log(y)
    if np.ptp(ly) < 1e-3:
        return 0.0, 1.0
    fit = stats.linregress(lx, ly)
    return float(fit.slope), float(fit.rvalue ** 2)


def _integral_diverges(split, power: float) -> bool:
    """Is the integral of |x|^power f over [-1, 1] divergent at the origin?"""
    def integrand(x):
        return 2.0 * x ** power * float(split.symmetric(x))

    partials = decade_partials(integrand, range(-1, -BG_DECADES - 1, -1))
    return looks_divergent(partials)


def estimate_bg_index(density) -> JumpIndexEstimate:
    split = split_symmetric(density)
    x = np.logspace(
        math.log10(default("bg_fit_x_min")), math.log10(default("bg_fit_x_max")), int(default("bg_fit_points"))
    )
    values = split.symmetric(x)
    if np.any(values <= 0.0):
        slope, r_squared = 0.0, 1.0
    else:
        slope, r_squared = log_log_fit(x, values)
    if r_squared < MIN_R_SQUARED:
        raise FitUnstable(f"bg_index: log-log fit R^2 = {r_squared:.4f} below {MIN_R_SQUARED}")
    fitted = float(np.clip(-slope - 1.0, 0.0, 2.0))

    if not _integral_diverges(split, 0.0):
        bisected = 0.0
    else:
        lo, hi = 0.0, 2.0
        for _ in range(BG_BISECTIONS):
            mid = 0.5 * (lo + hi)
            if _integral_diverges(split, mid):
                lo = mid
            else:
                hi = mid
        bisected = hi
    logger.debug("bg_index %s: fit %.4f, bisection %.4f", density.label, fitted, bisected)
    if abs(fitted - bisected) > BG_AGREEMENT:
        raise Inconsistent(
            f"bg_index: fitted {fitted:.4f} and bisection {bisected:.4f} disagree"
        )
    return JumpIndexEstimate(value=fitted, slope=slope, r_squared=r_squared, confirmation=bisected)


def bg_index(density) -> float:
    """Blumenthal-Getoor index: the smallest power with a finite |x|^power moment on [-1, 1]."""
    return estimate_bg_index(density).value


def _second_moment(split, r: float) -> float:
    """integral of x^2 f over [-r, r]."""
    density = split.density
    lower = r * GAMMA_DEPTH
    if density.has_hint:
        Y, C = density.hint_Y, density.hint_C
        head = C * r ** (2.0 - Y) / (2.0 - Y)
        rest, _ = _log_quad(lambda x: x * x * (float(split.symmetric(x)) - C * x ** (-1.0 - Y)), lower, r, 1e-300,
                           points=split.breakpoints)
        return 2.0 * (head + rest)
    body, _ = _log_quad(lambda x: x * x * float(split.symmetric(x)), lower, r, 1e-300, points=split.breakpoints)
    # continue the integrand below the cut as the local power law
    at_lower = lower * lower * float(split.symmetric(lower))
    nearby = (1.1 * lower) ** 2 * float(split.symmetric(1.1 * lower))
    if at_lower > 0.0 and nearby > 0.0:
        exponent = math.log(nearby / at_lower) / math.log(1.1)
        if exponent > -1.0:
            body += at_lower * lower / (exponent + 1.0)
    return 2.0 * body


def estimate_gamma_index(density) -> JumpIndexEstimate:
    split = split_symmetric(density)
    r = np.logspace(math.log10(default("gamma_r_min")), math.log10(default("gamma_r_max")), GAMMA_POINTS)
    moments = np.array([_second_moment(split, float(radius)) for radius in r])
    if np.all(moments <= 0.0):
        return JumpIndexEstimate(value=0.0, slope=float("inf"), r_squared=1.0)
    if np.any(moments <= 0.0):
        raise FitUnstable("gamma_index: truncated second moment vanishes on part of the range")
    slope, r_squared = log_log_fit(r, moments)
    if r_squared < MIN_R_SQUARED:
        raise FitUnstable(f"gamma_index: log-log fit R^2 = {r_squared:.4f} below {MIN_R_SQUARED}")
    value = float(np.clip(2.0 - slope, 0.0, 2.0))
    logger.debug("gamma_index %s: slope %.4f -> %.4f", density.label, slope, value)
    return JumpIndexEstimate(value=value, slope=slope, r_squared=r_squared)


def gamma_index(density) -> float:
    """Small-jump intensity index; zero when the truncated second moment decays faster than r^2."""
    return estimate_gamma_index(density).value


# Custom exceptions
class FitUnstable(Exception):
    pass


class Inconsistent(Exception):
    pass
