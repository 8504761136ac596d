"""
Moments of |mu_hat_t| certifying that L_t has a smooth bounded density.

M_n = integral of |xi|^n |mu_hat_t(xi)| over R^d, computed as a quadrature on
the ball of radius R plus a bound for the outside, where the Garding fit
gives |mu_hat_t(xi)| <= exp(-t K |xi|^alpha).
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from index_lab.grids import GridSpec
from index_lab.sobolev import sobolev_index
from symbol_core.utils import InvalidParams, default

logger = logging.getLogger(__name__)

QUAD_EPSREL = 1e-10
QUAD_LIMIT = 200
MAX_DOUBLINGS = 40
ANGLES = 64


@dataclass(frozen=True)
class MomentEstimate:
    order: int
    value: float
    tail_bound: float
    cutoff: float


def _tail_bounds(orders, t, K, alpha, R, dimension):
    """Upper bounds for the moments restricted to |xi| > R."""
    scale = t * K
    shape = (orders + dimension) / alpha
    bounds = scale ** (-shape) / alpha * special.gamma(shape) * special.gammaincc(shape, scale * R ** alpha)
    return bounds * (2.0 if dimension == 1 else 2.0 * np.pi)


def _radial_modulus(symbol, t):
    """r -> |mu_hat_t| summed over the sphere of radius r (angular integral for d = 2), times r^(d-1)."""
    if symbol.dimension == 1:
        def modulus(r):
            points = np.array([[r], [-r]])
            return float(np.exp(-t * symbol.evaluator(points).real).sum())
        return modulus

    angles = 2.0 * np.pi * np.arange(ANGLES) / ANGLES
    directions = np.column_stack([np.cos(angles), np.sin(angles)])

    def modulus(r):
        return r * float(np.exp(-t * symbol.evaluator(r * directions).real).mean()) * 2.0 * np.pi
    return modulus


def _piece(modulus, orders, a, b):
    values = []
    for n in orders:
        value, _ = integrate.quad(lambda r: r ** n * modulus(r), a, b, epsabs=0.0, epsrel=QUAD_EPSREL, limit=QUAD_LIMIT)
        values.append(value)
    return np.array(values)


def estimate_moments(symbol, t: float, n_max: int, report=None, grid: GridSpec = None) -> list:
    if not t > 0:
        raise InvalidParams(f"smoothness_moments needs t > 0 (got {t})")
    if symbol.dimension > 2:
        raise InvalidParams("smoothness moments are computed for d <= 2")
    if report is None:
        report = sobolev_index(symbol, grid or GridSpec())
    garding = report.diagnostics.get("garding") or {}
    K = garding.get("constant")
    crossover = garding.get("crossover")
    alpha = report.sobolev_index
    if alpha is None or K is None or not K > 0.0 or crossover is None:
        raise TailUnbounded(f"smoothness_moments: no Garding fit for {symbol.label}")

    tail_tol = default("moment_tail_tol")
    orders = np.arange(n_max + 1, dtype=float)
    modulus = _radial_modulus(symbol, t)
    R = 2.0 ** math.ceil(math.log2(max(crossover, 1.0)))
    total = _piece(modulus, orders, 0.0, 1.0)
    edge = 1.0
    for _ in range(MAX_DOUBLINGS):
        while edge < R:
            total = total + _piece(modulus, orders, edge, 2.0 * edge)
            edge *= 2.0
        tails = _tail_bounds(orders, t, K, alpha, edge, symbol.dimension)
        if np.all(tails < tail_tol * total):
            break
        R = 2.0 * edge
    else:
        raise TailUnbounded(f"smoothness_moments: tail did not fall below {tail_tol} of the moments")

    logger.info("moments of %s at t=%s certified up to radius %s", symbol.label, t, edge)
    return [
        MomentEstimate(order=int(n), value=float(value), tail_bound=float(tail), cutoff=edge)
        for n, value, tail in zip(orders, total, tails)
    ]


def smoothness_moments(symbol, t: float, n_max: int, report=None, grid: GridSpec = None) -> list:
    """[M_0, ..., M_n_max] with the tail remainder certified below 1e-8 relative."""
    return [moment.value for moment in estimate_moments(symbol, t, n_max, report=report, grid=grid)]


# Custom exceptions
class TailUnbounded(Exception):
    pass
