"""
Symbol components of a one-dimensional Levy density.

    A_fs(u)  = integral of (1 - cos(u x)) f_s(x) dx                  (real, >= 0)
    A_fas(u) = i integral of (sin(u x) - u h(x)) f_as(x) dx           (imaginary)

Both integrands are even in x, so everything is computed on x > 0 and doubled.
The piece [0, eps] takes the singular power law C/x^(1+Y) semi-analytically
(substituting t = |u| x); the remainder and the outer region go through
adaptive quadrature, with QAWO/QAWF weights once the integrand oscillates.
"""
import logging
import math
import warnings
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
from scipy import integrate

from symbol_core.constants import Truncation
from symbol_core.utils import default

logger = logging.getLogger(__name__)

QUAD_LIMIT = 200
# The log-variable integrals start this many decades below their upper end.
LOG_DEPTH = 18.0
# Direct quadrature covers this many periods of cos(u x) before the weighted rules take over.
DIRECT_PERIODS = 4
SERIES_SWITCH = 4.0
DIVERGENCE_STEP = 0.05
DIVERGENCE_RUN = 3


@dataclass(frozen=True)
class DensitySplit:
    symmetric: Callable
    antisymmetric: Callable
    density: object
    is_symmetric: bool
    first_moment_finite: bool = True

    @property
    def hint_Y(self):
        return self.density.hint_Y

    @property
    def hint_C(self):
        return self.density.hint_C

    @property
    def cutoff(self):
        return self.density.cutoff

    @property
    def breakpoints(self) -> tuple:
        """Interior kinks of the density on x > 0 (table nodes)."""
        return tuple(getattr(self.density, "breakpoints", ()))


def split_symmetric(density) -> DensitySplit:
    """f_s(x) = (f(x) + f(-x))/2 and f_as(x) = (f(x) - f(-x))/2."""
    if getattr(density, "dimension", 1) != 1:
        raise NotOneDimensional(f"{density.label}: density splitting is one-dimensional")

    def symmetric(x):
        x = np.asarray(x, dtype=float)
        return 0.5 * (density(x) + density(-x))

    def antisymmetric(x):
        x = np.asarray(x, dtype=float)
        return 0.5 * (density(x) - density(-x))

    upper = np.log10(density.cutoff) if density.cutoff else 3.0
    samples = np.logspace(-8.0, upper, 129)
    f_s = symmetric(samples)
    f_as = antisymmetric(samples)
    if np.any(np.abs(f_as) > f_s * (1.0 + 1e-12)):
        raise DivergentIntegral(f"{density.label}: |f_as| exceeds f_s on the sample grid")
    is_symmetric = bool(np.all(np.abs(f_as) <= 1e-15 * np.maximum(f_s, 1e-300)))
    split = DensitySplit(symmetric, antisymmetric, density, is_symmetric)
    levy_measure_mass_check(split)
    if not is_symmetric:
        split = replace(split, first_moment_finite=_first_moment_finite(split))
    return split


def _quad(fn, a, b, budget, limit=QUAD_LIMIT, **kwargs):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, error = integrate.quad(fn, a, b, epsabs=budget, epsrel=1e-12, limit=limit, **kwargs)
    return value, error


def _inner(points, lo, hi) -> list:
    return [p for p in points if lo < p < hi]


def _log_quad(fn, lo, hi, budget, limit=QUAD_LIMIT, points=()):
    """
    integral of fn over [lo, hi] in the variable log x. Kinks of fn listed in
    ``points`` become breakpoints of the adaptive rule.
    """
    if hi <= lo:
        return 0.0, 0.0

    def integrand(t):
        x = math.exp(t)
        return float(fn(x)) * x

    inner = _inner(points, lo, hi)
    if inner:
        return _quad(integrand, math.log(lo), math.log(hi), budget, limit=limit + 2 * len(inner),
                     points=np.log(inner))
    return _quad(integrand, math.log(lo), math.log(hi), budget, limit=limit)


def _weighted_quad(fn, lo, hi, budget, limit, weight, s, points=()):
    """
    QAWO/QAWF integral of fn cos(s x) or fn sin(s x). A finite range with
    kinks that misses the budget in one piece is redone node by node.
    """
    inner = _inner(points, lo, hi) if np.isfinite(hi) else []
    value, error = _quad(fn, lo, hi, budget, limit, weight=weight, wvar=s)
    if not inner or error <= budget:
        return value, error
    edges = [lo] + inner + [hi]
    share = budget / (len(edges) - 1)
    value = error = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        piece = _quad(fn, a, b, share, limit, weight=weight, wvar=s)
        value += piece[0]
        error += piece[1]
    return value, error


def _one_minus_cos(y):
    return 2.0 * math.sin(0.5 * y) ** 2


def _sin_minus_id(y):
    """sin(y) - y without cancellation for small y."""
    if abs(y) < 1e-2:
        y2 = y * y
        return -y * y2 / 6.0 * (1.0 - y2 / 20.0 * (1.0 - y2 / 42.0))
    return math.sin(y) - y


def power_law_cosine_integral(T: float, Y: float, budget: float = 1e-13) -> float:
    """J(T) = integral over [0, T] of (1 - cos t) t^(-1-Y) dt, 0 <= Y < 2."""
    if T <= 0.0:
        return 0.0
    head = min(T, SERIES_SWITCH)
    total = 0.0
    term_power = head * head
    factorial = 2.0
    k = 1
    while True:
        term = term_power * head ** (-Y) / (factorial * (2 * k - Y))
        total += term if k % 2 == 1 else -term
        if term < 1e-18 * max(abs(total), 1e-300):
            break
        k += 1
        term_power *= head * head
        factorial *= (2 * k - 1) * (2 * k)
    if T <= SERIES_SWITCH:
        return total
    if Y == 0.0:
        plain = math.log(T / SERIES_SWITCH)
    else:
        plain = (SERIES_SWITCH ** (-Y) - T ** (-Y)) / Y
    upper = T if np.isfinite(T) else np.inf
    oscillating, _ = _quad(lambda t: t ** (-1.0 - Y), SERIES_SWITCH, upper, budget, weight="cos", wvar=1.0)
    return total + plain - oscillating


def _symmetric_part(split: DensitySplit, s: float, budget: float, eps: float, limit: int):
    f_s = split.symmetric
    nodes = split.breakpoints
    pieces = []

    if split.density.has_hint:
        Y, C = split.hint_Y, split.hint_C
        pieces.append((C * s ** Y * power_law_cosine_integral(s * eps, Y), 0.0))

        def remainder(x):
            return _one_minus_cos(s * x) * (float(f_s(x)) - C * x ** (-1.0 - Y))

        pieces.append(_log_quad(remainder, eps * 10 ** -LOG_DEPTH, eps, budget, limit, nodes))
    else:
        pieces.append(_log_quad(lambda x: _one_minus_cos(s * x) * float(f_s(x)),
                                eps * 10 ** -LOG_DEPTH, eps, budget, limit, nodes))

    upper = split.cutoff if split.cutoff is not None else np.inf
    turn = min(upper, max(eps, DIRECT_PERIODS * 2.0 * np.pi / s))
    pieces.append(_log_quad(lambda x: _one_minus_cos(s * x) * float(f_s(x)), eps, turn, budget, limit, nodes))
    if turn < upper:
        if np.isfinite(upper):
            mass = _log_quad(lambda x: float(f_s(x)), turn, upper, budget, limit, nodes)
        else:
            mass = _quad(lambda x: float(f_s(x)), turn, np.inf, budget, limit)
        wave = _weighted_quad(lambda x: float(f_s(x)), turn, upper, budget, limit, "cos", s, nodes)
        pieces.append((mass[0] - wave[0], mass[1] + wave[1]))

    value = 2.0 * sum(p[0] for p in pieces)
    error = 2.0 * sum(p[1] for p in pieces)
    return value, error


def _antisymmetric_part(split: DensitySplit, s: float, budget: float, eps: float, limit: int, radius: float):
    f_as = split.antisymmetric
    nodes = split.breakpoints
    pieces = []

    def compensated(x):
        if x < radius:
            return _sin_minus_id(s * x) * float(f_as(x))
        return math.sin(s * x) * float(f_as(x))

    upper = split.cutoff if split.cutoff is not None else np.inf
    turn = min(upper, max(eps, DIRECT_PERIODS * 2.0 * np.pi / s))
    pieces.append(_log_quad(compensated, eps * 10 ** -LOG_DEPTH, eps, budget, limit, nodes))
    if eps < radius < turn:
        pieces.append(_log_quad(compensated, eps, radius, budget, limit, nodes))
        pieces.append(_log_quad(compensated, radius, turn, budget, limit, nodes))
    else:
        pieces.append(_log_quad(compensated, eps, turn, budget, limit, nodes))
    if turn < upper:
        pieces.append(_weighted_quad(lambda x: float(f_as(x)), turn, upper, budget, limit, "sin", s, nodes))
        linear_end = min(upper, radius)
        if turn < linear_end:
            if np.isfinite(linear_end):
                drift = _log_quad(lambda x: x * float(f_as(x)), turn, linear_end, budget, limit, nodes)
            else:
                drift = _quad(lambda x: x * float(f_as(x)), turn, np.inf, budget, limit)
            pieces.append((-s * drift[0], s * drift[1]))

    value = 2.0 * sum(p[0] for p in pieces)
    error = 2.0 * sum(p[1] for p in pieces)
    return value, error


def symbol_parts_from_density(split: DensitySplit, u: float, *, truncation=Truncation.IDENTITY,
                              eps: float = None, limit: int = QUAD_LIMIT):
    """
    (A_fs(u), A_fas(u)) for a split density.

    The combined absolute error estimate must stay below
    quadrature_tol (1 + u^2), otherwise ``QuadratureFailure`` is raised. With
    h(x) = x the antisymmetric part must satisfy the first-moment condition
    (``DivergentIntegral``).
    """
    u = float(u)
    if u == 0.0:
        return 0.0, 0j
    s = abs(u)
    eps = default("quadrature_eps") if eps is None else eps
    tolerance = default("quadrature_tol") * (1.0 + u * u)
    budget = tolerance / 16.0
    truncation = Truncation(truncation)

    a_fs, error_fs = _symmetric_part(split, s, budget, eps, limit)
    a_fas, error_fas = 0.0, 0.0
    if not split.is_symmetric:
        if truncation is Truncation.IDENTITY:
            check_first_moment(split)
            radius = np.inf
        else:
            radius = 1.0
        a_fas, error_fas = _antisymmetric_part(split, s, budget, eps, limit, radius)

    error = error_fs + error_fas
    if not error <= tolerance:
        raise QuadratureFailure(
            f"symbol_parts_from_density: error estimate {error:.3g} exceeds {tolerance:.3g} at u={u:g}"
        )
    logger.debug("density symbol at u=%s: A_fs=%s A_fas=%s err=%s", u, a_fs, a_fas, error)
    return max(a_fs, 0.0), 1j * math.copysign(1.0, u) * a_fas


def decade_partials(fn, exponents) -> list:
    """Cumulative integrals of fn over consecutive decades [10^k, 10^(k+1)] (or reversed)."""
    totals = []
    running = 0.0
    for k in exponents:
        lo, hi = sorted((10.0 ** k, 10.0 ** (k + 1)))
        value, _ = _log_quad(fn, lo, hi, 1e-14)
        running += value
        totals.append(running)
    return totals


def looks_divergent(partials) -> bool:
    """Relative growth above 5% over each of the last three refinements."""
    if len(partials) < DIVERGENCE_RUN + 1:
        return False
    tail = partials[-(DIVERGENCE_RUN + 1):]
    for before, after in zip(tail[:-1], tail[1:]):
        if before <= 0.0:
            if after <= 0.0:
                return False
            continue
        if (after - before) / before <= DIVERGENCE_STEP:
            return False
    return True


def _outer_exponents(split: DensitySplit, stop: int = 8):
    if split.cutoff is None:
        return range(0, stop)
    top = int(math.ceil(math.log10(split.cutoff)))
    return range(0, max(top, 1))


def _first_moment_finite(split: DensitySplit) -> bool:
    def moment(x):
        return abs(x * float(split.antisymmetric(x)))

    inner = decade_partials(moment, range(-1, -16, -1))
    outer = decade_partials(moment, _outer_exponents(split))
    return not (looks_divergent(inner) or looks_divergent(outer))


def check_first_moment(split: DensitySplit):
    """integral of |x f_as(x)| must be finite near 0 and at infinity."""
    if not split.first_moment_finite:
        raise DivergentIntegral(f"{split.density.label}: integral of |x f_as(x)| diverges")


def levy_measure_mass_check(split: DensitySplit):
    """The Levy-measure condition: integral of min(x^2, 1) f(x) is finite."""
    inner = decade_partials(lambda x: x * x * float(split.symmetric(x)), range(-1, -16, -1))
    outer = decade_partials(lambda x: float(split.symmetric(x)), _outer_exponents(split))
    if looks_divergent(inner) or looks_divergent(outer):
        raise DivergentIntegral(f"{split.density.label}: integral of min(x^2, 1) F(dx) diverges")


# Custom exceptions
class NotOneDimensional(Exception):
    pass


class QuadratureFailure(Exception):
    pass


class DivergentIntegral(Exception):
    pass
