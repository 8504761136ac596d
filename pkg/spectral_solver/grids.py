"""
Frequency grids and the spectral fields living on them.

A field stores the values of u_hat at the grid frequencies; spatial functions
never appear explicitly. Integrals over frequency space are Riemann sums with
cell volume ``spacing ** d``.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from django.conf import settings

from index_lab.grids import InvalidGrid
from symbol_core.utils import InvalidParams

logger = logging.getLogger(__name__)

MIN_MODES = 8
SYMMETRY_TOL = 1e-12


@dataclass(frozen=True)
class FrequencyGrid:
    dimension: int
    modes: int
    cutoff: float

    def __post_init__(self):
        if self.dimension not in (1, 2):
            raise InvalidGrid(f"frequency grids support d = 1 or 2 (got {self.dimension})")
        modes = int(self.modes)
        if modes < MIN_MODES or modes & (modes - 1):
            raise InvalidGrid(f"modes per axis must be a power of two >= {MIN_MODES} (got {self.modes})")
        if not self.cutoff > 0.0 or not math.isfinite(self.cutoff):
            raise InvalidGrid(f"cutoff must be positive (got {self.cutoff})")

    @property
    def spacing(self) -> float:
        return 2.0 * self.cutoff / self.modes

    @property
    def cell(self) -> float:
        return self.spacing ** self.dimension

    @property
    def period(self) -> float:
        """Spatial period implied by the frequency spacing."""
        return 2.0 * math.pi / self.spacing

    @property
    def shape(self) -> tuple:
        return (self.modes,) * self.dimension

    def axis(self) -> np.ndarray:
        return -self.cutoff + self.spacing * np.arange(self.modes)

    def frequencies(self) -> np.ndarray:
        """Shape ``(N,)`` in one dimension, ``(N, N, 2)`` in two."""
        axis = self.axis()
        if self.dimension == 1:
            return axis
        first, second = np.meshgrid(axis, axis, indexing="ij")
        return np.stack([first, second], axis=-1)

    def magnitudes(self) -> np.ndarray:
        xi = self.frequencies()
        if self.dimension == 1:
            return np.abs(xi)
        return np.linalg.norm(xi, axis=-1)

    def spatial_axis(self) -> np.ndarray:
        """Points x_j = (j - N/2) pi / cutoff matching the FFT inversion."""
        return (np.arange(self.modes) - self.modes // 2) * (math.pi / self.cutoff)

    def mirror(self, values: np.ndarray) -> np.ndarray:
        """values(-xi); the Nyquist mode -cutoff is its own mirror."""
        axes = tuple(range(self.dimension))
        return np.roll(np.flip(values, axis=axes), 1, axis=axes)

    def outer_shell(self, fraction: float = 0.125) -> np.ndarray:
        """Modes with some coordinate within ``fraction * cutoff`` of the boundary."""
        xi = self.frequencies()
        if self.dimension == 1:
            reach = np.abs(xi)
        else:
            reach = np.max(np.abs(xi), axis=-1)
        return reach >= (1.0 - fraction) * self.cutoff


def default_grid(dimension: int = 1) -> FrequencyGrid:
    """Solver grid from the defaults table; d = 2 keeps the total mode count."""
    defaults = settings.LEVYSOBOLEV_DEFAULTS
    modes = int(defaults["solver_modes"])
    if dimension == 2:
        modes = int(round(math.sqrt(modes)))
    return FrequencyGrid(dimension=dimension, modes=modes, cutoff=float(defaults["solver_cutoff"]))


@dataclass(frozen=True, eq=False)
class SpectralField:
    grid: FrequencyGrid
    coefficients: np.ndarray = field(repr=False)
    real_valued: bool = False

    def __post_init__(self):
        values = np.asarray(self.coefficients, dtype=complex)
        if values.shape != self.grid.shape:
            raise GridMismatch(f"coefficients have shape {values.shape}, grid expects {self.grid.shape}")
        object.__setattr__(self, "coefficients", values)

    @classmethod
    def from_function(cls, grid: FrequencyGrid, fn, real_valued: bool = False) -> "SpectralField":
        """Sample ``fn`` at the grid frequencies; real-valued fields are checked for conj symmetry."""
        result = cls(grid, fn(grid.frequencies()), real_valued)
        if real_valued:
            gap = result.conj_symmetry_gap()
            scale = max(1.0, float(np.max(np.abs(result.coefficients))))
            if gap > SYMMETRY_TOL * scale:
                raise InvalidParams(f"field flagged real-valued but u_hat(-xi) != conj(u_hat(xi)) (gap {gap:.3e})")
        return result

    @classmethod
    def zeros(cls, grid: FrequencyGrid) -> "SpectralField":
        return cls(grid, np.zeros(grid.shape, dtype=complex), True)

    def conj_symmetry_gap(self) -> float:
        mirrored = self.grid.mirror(self.coefficients)
        return float(np.max(np.abs(mirrored - np.conj(self.coefficients))))

    def symmetrized(self) -> "SpectralField":
        mirrored = np.conj(self.grid.mirror(self.coefficients))
        return SpectralField(self.grid, 0.5 * (self.coefficients + mirrored), True)

    def with_coefficients(self, coefficients, real_valued=None) -> "SpectralField":
        flag = self.real_valued if real_valued is None else real_valued
        return SpectralField(self.grid, coefficients, flag)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        require_same_grid(self, other)
        return self.with_coefficients(self.coefficients - other.coefficients, self.real_valued and other.real_valued)


def require_same_grid(*fields):
    grids = {item.grid for item in fields}
    if len(grids) > 1:
        raise GridMismatch(f"fields live on different grids: {sorted(map(repr, grids))}")
    return fields[0].grid


# Custom exceptions
class GridMismatch(Exception):
    pass
