"""
Time stepping of du/dt + A u = f in the Fourier basis.

The generator is a Fourier multiplier, so every mode is an independent scalar
ODE u_hat' = -A(xi) u_hat + f_hat(t, xi) and the Galerkin system is diagonal.
"""
import enum
import logging
from dataclasses import dataclass

import numpy as np

from spectral_solver.forms import symbol_on_grid
from spectral_solver.grids import GridMismatch, SpectralField, require_same_grid
from symbol_core.utils import InvalidParams

logger = logging.getLogger(__name__)

AMPLIFICATION_TOL = 1e-12


class Scheme(str, enum.Enum):
    EXACT = "exact"
    IMPLICIT_EULER = "implicit_euler"
    CRANK_NICOLSON = "crank_nicolson"


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: tuple
    fields: tuple
    scheme: Scheme

    def __post_init__(self):
        if len(self.times) != len(self.fields) or not self.fields:
            raise InvalidParams("trajectory needs one field per time point")
        if np.any(np.diff(np.asarray(self.times, dtype=float)) <= 0.0):
            raise InvalidParams("trajectory time points must be strictly increasing")
        require_same_grid(*self.fields)

    @property
    def grid(self):
        return self.fields[0].grid

    @property
    def final(self) -> SpectralField:
        return self.fields[-1]


def _source(f_hat, grid):
    """Normalize the forcing into a callable t -> coefficient array (or None)."""
    if f_hat is None:
        return None
    if isinstance(f_hat, SpectralField):
        if f_hat.grid != grid:
            raise GridMismatch("source and initial field live on different grids")
        return lambda t: f_hat.coefficients

    def at(t):
        value = f_hat(t)
        if value.grid != grid:
            raise GridMismatch(f"source at t={t} lives on a different grid")
        return value.coefficients

    return at


def _exact_step(z, dt):
    decay = np.exp(-z * dt)
    # phi(z) = (1 - exp(-z dt)) / z integrates a constant source over one step
    phi = np.full(z.shape, dt, dtype=complex)
    moving = z != 0
    phi[moving] = -np.expm1(-z[moving] * dt) / z[moving]
    return decay, phi


def _check_amplification(z, dt, grid):
    amplification = np.abs((1.0 - 0.5 * z * dt) / (1.0 + 0.5 * z * dt))
    worst = int(np.argmax(amplification))
    if amplification.flat[worst] > 1.0 + AMPLIFICATION_TOL:
        xi = grid.frequencies().reshape(-1, grid.dimension)[worst]
        raise UnstableScheme(
            f"evolve[crank_nicolson]: amplification {amplification.flat[worst]:.6g} > 1 at xi={xi.tolist()}"
        )


def evolve(symbol, g_hat: SpectralField, f_hat=None, T: float = 1.0, K: int = 1,
           scheme: Scheme = Scheme.EXACT, t0: float = 0.0) -> Trajectory:
    """
    Integrate every mode from ``t0`` to ``t0 + T`` in ``K`` equal steps.

    ``f_hat`` is None, a constant SpectralField or a callable ``t -> SpectralField``;
    the exact scheme treats it as constant on each step (value at the step start),
    the rational schemes use it at the step endpoints.
    """
    if not T > 0.0:
        raise InvalidParams(f"evolve needs T > 0 (got {T})")
    if int(K) < 1:
        raise InvalidParams(f"evolve needs K >= 1 (got {K})")
    scheme = Scheme(scheme)
    grid = g_hat.grid
    K = int(K)
    dt = T / K
    z = symbol_on_grid(symbol, grid)
    source = _source(f_hat, grid)

    if scheme is Scheme.EXACT:
        decay, phi = _exact_step(z, dt)
    elif scheme is Scheme.CRANK_NICOLSON:
        _check_amplification(z, dt, grid)

    times = [t0 + dt * k for k in range(K + 1)]
    current = g_hat.coefficients
    states = [current]
    for k in range(K):
        if scheme is Scheme.EXACT:
            current = decay * current
            if source is not None:
                current = current + phi * source(times[k])
        elif scheme is Scheme.IMPLICIT_EULER:
            rhs = current if source is None else current + dt * source(times[k + 1])
            current = rhs / (1.0 + z * dt)
        else:
            rhs = (1.0 - 0.5 * z * dt) * current
            if source is not None:
                rhs = rhs + 0.5 * dt * (source(times[k]) + source(times[k + 1]))
            current = rhs / (1.0 + 0.5 * z * dt)
        states.append(current)

    logger.debug("evolve %s: scheme=%s T=%s K=%s", symbol.label, scheme.value, T, K)
    fields = tuple(g_hat.with_coefficients(state) for state in states)
    return Trajectory(times=tuple(times), fields=fields, scheme=scheme)


# Custom exceptions
class UnstableScheme(Exception):
    pass
