"""
Numerical checks of the growth bounds that tie a Levy density's small-jump
behaviour to the growth of its symbol parts.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from levy_measure.indices import estimate_bg_index, log_log_fit
from levy_measure.quadrature import _log_quad, _quad, split_symmetric, symbol_parts_from_density
from symbol_core.utils import InvalidParams

logger = logging.getLogger(__name__)

# Slopes of a ratio in log-log coordinates within this band count as bounded.
TREND_SLACK = 0.05


@dataclass(frozen=True)
class BoundCheck:
    applicable: bool
    passed: bool = False
    constants: dict = field(default_factory=dict)
    trend: Optional[float] = None


@dataclass(frozen=True)
class BoundReport:
    Y: float
    parts: dict

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.parts.values() if check.applicable)


def _upper_half(u: np.ndarray) -> np.ndarray:
    return u >= math.sqrt(u.min() * u.max())


def _trend(u, ratio, mask) -> float:
    """log-log slope of a nonnegative ratio over the masked points; 0 for a vanishing ratio."""
    picked = ratio[mask]
    if np.all(picked <= 0.0):
        return 0.0
    if np.any(picked <= 0.0):
        return float("inf")
    slope, _ = log_log_fit(u[mask], picked)
    return slope


def _mean_jump(split) -> float:
    """integral of x F(dx) for a finite-variation density."""
    upper = split.cutoff
    inner, _ = _log_quad(lambda x: x * float(split.antisymmetric(x)), 1e-20, upper or 1.0, 1e-14)
    if upper is None:
        extra, _ = _quad(lambda x: x * float(split.antisymmetric(x)), 1.0, np.inf, 1e-14)
        inner += extra
    return 2.0 * inner


def verify_appendix_bounds(split, Y: float, grid) -> BoundReport:
    """Fit and judge the four growth bounds for the symbol parts of ``split``."""
    if not (0.0 < Y < 2.0):
        raise InvalidParams(f"bound exponent Y must lie in (0, 2) (got {Y})")
    u = np.unique(np.abs(np.asarray(grid, dtype=float)))
    u = u[u > 0.0]
    if u.size < 4:
        raise InvalidParams("bound checks need at least four positive grid points")
    parts = [symbol_parts_from_density(split, float(value)) for value in u]
    a_fs = np.array([p[0] for p in parts])
    a_fas = np.array([p[1].imag for p in parts])
    upper = _upper_half(u)
    Y_lower = Y / 2.0
    checks = {}

    ratio = a_fs / (1.0 + u ** Y)
    trend = _trend(u, ratio, upper)
    checks["a"] = BoundCheck(True, trend <= TREND_SLACK, {"C": float(ratio.max())}, trend)

    ratio = a_fs / u ** Y
    C1 = 0.5 * float(ratio[upper].min())
    C2 = float(max(0.0, np.max((C1 * u ** Y - a_fs) / (1.0 + u ** Y_lower))))
    trend = _trend(u, ratio, upper)
    checks["b"] = BoundCheck(
        True,
        C1 > 0.0 and trend >= -TREND_SLACK,
        {"C1": C1, "C2": C2, "Y_lower": Y_lower},
        trend,
    )

    if abs(Y - 1.0) > 1e-9:
        ratio = np.abs(a_fas) / (1.0 + u ** max(1.0, Y))
        trend = _trend(u, ratio, upper)
        checks["c"] = BoundCheck(True, trend <= TREND_SLACK, {"C": float(ratio.max())}, trend)
    else:
        checks["c"] = BoundCheck(False)

    if split.density.finite_variation and Y < 1.0:
        drift = _mean_jump(split)
        imag = np.abs(drift * u + a_fas)
        ratio = imag / (1.0 + u ** Y)
        trend = _trend(u, ratio, upper)
        checks["d"] = BoundCheck(True, trend <= TREND_SLACK, {"C": float(ratio.max()), "drift": drift}, trend)
    else:
        checks["d"] = BoundCheck(False)

    logger.debug("appendix bounds for %s at Y=%s: %s", split.density.label, Y, checks)
    return BoundReport(Y=Y, parts=checks)


@dataclass(frozen=True)
class ConditionReport:
    Y: float
    case: str
    alpha_as: Optional[float]
    delta: Optional[float]
    first_moment_finite: bool
    holds: bool
    index: Optional[float]


def check_density_conditions(density, drift_is_mean_jump: bool = True) -> ConditionReport:
    """
    Sufficient density conditions for a Sobolev index Y: f_s = C/|x|^(1+Y) plus a
    strictly weaker singularity, and an antisymmetric part with
    f_as = O(|x|^-alpha_as) where alpha_as <= 1 + Y (0 < Y < 1, which also needs a
    finite first moment and the mean-jump drift) or alpha_as < 2 (Y = 1).
    Any 1 < Y < 2 qualifies.
    """
    split = split_symmetric(density)
    if density.has_hint:
        Y, C = density.hint_Y, density.hint_C
    else:
        Y = estimate_bg_index(density).value
        C = None

    x = np.logspace(-6.0, -2.0, 64)
    if split.is_symmetric:
        alpha_as = None
    else:
        magnitude = np.abs(split.antisymmetric(x))
        alpha_as = -log_log_fit(x, magnitude)[0] if np.all(magnitude > 0.0) else None

    delta = None
    if C is not None:
        remainder = np.abs(split.symmetric(x) - C * x ** (-1.0 - Y))
        if np.all(remainder > 0.0):
            delta = (1.0 + Y) + log_log_fit(x, remainder)[0]
        else:
            delta = 1.0 + Y
    weaker = delta is None or delta > 0.0

    if Y <= 0.0:
        case, holds = "none", False
    elif Y < 1.0 - 1e-9:
        case = "finite_variation"
        holds = (
            weaker
            and (alpha_as is None or alpha_as <= 1.0 + Y + TREND_SLACK)
            and split.first_moment_finite
            and drift_is_mean_jump
        )
    elif Y <= 1.0 + 1e-9:
        case = "cauchy_like"
        holds = weaker and (alpha_as is None or alpha_as < 2.0)
    else:
        case = "infinite_variation"
        holds = weaker
    return ConditionReport(
        Y=float(Y),
        case=case,
        alpha_as=alpha_as,
        delta=delta,
        first_moment_finite=split.first_moment_finite,
        holds=bool(holds),
        index=float(Y) if holds else None,
    )
