"""Test payoffs with closed-form Fourier transforms (u_hat(xi) = int exp(i xi x) u(x) dx)."""
import math

import numpy as np
from scipy import special

from spectral_solver.grids import FrequencyGrid, SpectralField
from symbol_core.utils import InvalidParams


def gaussian_payoff(grid: FrequencyGrid, amplitude: float = 1.0, mean=0.0, scale: float = 1.0) -> SpectralField:
    """g(x) = a exp(-|x - m|^2 / (2 s^2)); per axis g_hat = a s sqrt(2 pi) exp(i xi m - s^2 xi^2 / 2)."""
    if not scale > 0.0:
        raise InvalidParams(f"gaussian payoff needs scale > 0 (got {scale})")
    center = np.broadcast_to(np.asarray(mean, dtype=float), (grid.dimension,))
    xi = grid.frequencies().reshape(grid.shape + (grid.dimension,))
    phase = xi @ center
    squared = np.sum(xi ** 2, axis=-1)
    coefficients = (
        amplitude * (scale * math.sqrt(2.0 * math.pi)) ** grid.dimension
        * np.exp(1j * phase - 0.5 * scale ** 2 * squared)
    )
    return SpectralField(grid, coefficients, True)


def gaussian_values(x, amplitude: float = 1.0, mean: float = 0.0, scale: float = 1.0) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return amplitude * np.exp(-((x - mean) ** 2) / (2.0 * scale ** 2))


def hermite_function(n: int, y) -> np.ndarray:
    """psi_n(y) = (2^n n! sqrt(pi))^(-1/2) H_n(y) exp(-y^2 / 2)."""
    y = np.asarray(y, dtype=float)
    log_norm = -0.5 * (n * math.log(2.0) + special.gammaln(n + 1) + 0.5 * math.log(math.pi))
    return special.eval_hermite(n, y) * np.exp(log_norm - 0.5 * y ** 2)


def hermite_payoff(grid: FrequencyGrid, order: int, mean: float = 0.0, scale: float = 1.0) -> SpectralField:
    """g(x) = psi_n((x - m) / s); g_hat(xi) = s exp(i xi m) sqrt(2 pi) i^n psi_n(s xi)."""
    if grid.dimension != 1:
        raise InvalidParams("hermite payoffs are one-dimensional")
    if int(order) < 0 or not scale > 0.0:
        raise InvalidParams(f"hermite payoff needs order >= 0 and scale > 0 (got {order}, {scale})")
    order = int(order)
    xi = grid.frequencies()
    coefficients = (
        scale * np.exp(1j * xi * mean) * math.sqrt(2.0 * math.pi) * (1j ** order)
        * hermite_function(order, scale * xi)
    )
    return SpectralField(grid, coefficients, True)
