"""Fourier inversion on a frequency grid: prices v(tau, x) and transition densities."""
import logging
import math

import numpy as np

from spectral_solver.forms import symbol_on_grid
from spectral_solver.grids import FrequencyGrid, GridMismatch, SpectralField, default_grid
from symbol_core.symbols import char_fn
from symbol_core.utils import InvalidParams, default

logger = logging.getLogger(__name__)

NEGATIVE_TOL = 1e-6
CHUNK = 256


def _points(x_points, dimension: int) -> np.ndarray:
    points = np.asarray(x_points, dtype=float)
    if dimension == 1:
        return points.reshape(-1, 1)
    if points.ndim != 2 or points.shape[1] != dimension:
        raise InvalidParams(f"x_points must have shape (m, {dimension})")
    return points


def _tail_bound(grid: FrequencyGrid, integrand: np.ndarray) -> float:
    """Mass of the inversion integrand in the outer shell of the grid."""
    shell = grid.outer_shell()
    return float(np.sum(np.abs(integrand[shell]))) * grid.cell / (2.0 * math.pi) ** grid.dimension


def _check_tail(grid, integrand, where: str, tol: float):
    bound = _tail_bound(grid, integrand)
    if bound > tol:
        raise TailTooFat(f"{where}: inversion tail {bound:.3e} exceeds {tol:.1e} at cutoff {grid.cutoff}")
    logger.debug("%s: tail bound %.3e", where, bound)


def invert(grid: FrequencyGrid, integrand: np.ndarray, x_points) -> np.ndarray:
    """(2 pi)^-d sum exp(-i <xi, x>) integrand(xi) dxi^d at arbitrary points."""
    points = _points(x_points, grid.dimension)
    xi = grid.frequencies().reshape(-1, grid.dimension)
    weights = integrand.reshape(-1)
    out = np.empty(len(points), dtype=complex)
    for start in range(0, len(points), CHUNK):
        block = points[start:start + CHUNK]
        out[start:start + CHUNK] = np.exp(-1j * (block @ xi.T)) @ weights
    return out * grid.cell / (2.0 * math.pi) ** grid.dimension


def invert_on_window(grid: FrequencyGrid, integrand: np.ndarray):
    """
    Inversion at the spatial points x_j = (j - N/2) pi / cutoff through one FFT.

    With xi_k = -cutoff + k dxi the phase factors reduce to (-1)^k before and
    (-1)^j after the transform; N/2 is even for every admissible N.
    """
    sign = (-1.0) ** np.arange(grid.modes)
    if grid.dimension == 2:
        sign = np.multiply.outer(sign, sign)
    values = sign * np.fft.fftn(sign * integrand)
    return grid.spatial_axis(), values * grid.cell / (2.0 * math.pi) ** grid.dimension


def conditional_expectation(symbol, g_hat: SpectralField, tau: float, x_points, tail_tol: float = None):
    """
    v(x) = E g(x + L_tau) through its Fourier representation
    v(x) = (2 pi)^-d sum exp(-i <xi, x>) exp(-tau A(xi)) g_hat(xi) dxi^d.

    Real-valued payoffs give real prices.
    """
    if not tau >= 0.0:
        raise InvalidParams(f"conditional_expectation needs tau >= 0 (got {tau})")
    tail_tol = default("tail_tol") if tail_tol is None else tail_tol
    grid = g_hat.grid
    if tau == 0.0:
        integrand = g_hat.coefficients
    else:
        integrand = np.exp(-tau * symbol_on_grid(symbol, grid)) * g_hat.coefficients
    _check_tail(grid, integrand, "conditional_expectation", tail_tol)
    values = invert(grid, integrand, x_points)
    return values.real if g_hat.real_valued else values


def _density_integrand(symbol, t: float, grid: FrequencyGrid):
    if symbol.dimension != grid.dimension:
        raise GridMismatch(f"symbol {symbol.label} has d={symbol.dimension}, grid has d={grid.dimension}")
    integrand = np.asarray(char_fn(symbol, t, grid.frequencies()), dtype=complex).reshape(grid.shape)
    _check_tail(grid, integrand, f"density[{symbol.label}]", default("tail_tol"))
    return integrand


def _warn_negative(values, label):
    lowest = float(np.min(values))
    if lowest < -NEGATIVE_TOL:
        logger.warning("density of %s dips to %.3e", label, lowest)


def density(symbol, t: float, x_points, grid: FrequencyGrid = None) -> np.ndarray:
    """p_t(x) = (2 pi)^-d sum exp(-i <xi, x>) mu_hat_t(xi) dxi^d."""
    grid = grid or default_grid(symbol.dimension)
    values = invert(grid, _density_integrand(symbol, t, grid), x_points).real
    _warn_negative(values, symbol.label)
    return values


def density_on_window(symbol, t: float, grid: FrequencyGrid = None):
    """Density on the full spatial window of the grid; returns (axis, values)."""
    grid = grid or default_grid(symbol.dimension)
    axis, values = invert_on_window(grid, _density_integrand(symbol, t, grid))
    values = values.real
    _warn_negative(values, symbol.label)
    return axis, values


# Custom exceptions
class TailTooFat(Exception):
    pass
