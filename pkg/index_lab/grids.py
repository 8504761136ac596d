"""Radial sampling grids for the asymptotic fits."""
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from symbol_core.utils import default

DIRECTION_SEED = 0


@dataclass(frozen=True)
class GridSpec:
    r_min: float = field(default_factory=lambda: default("grid_r_min"))
    r_max: float = field(default_factory=lambda: default("grid_r_max"))
    points_per_decade: int = field(default_factory=lambda: default("grid_points_per_decade"))
    directions: Optional[int] = None

    def __post_init__(self):
        if not self.r_min >= 1.0:
            raise InvalidGrid(f"r_min must be >= 1 (got {self.r_min})")
        if not self.r_max / self.r_min >= 1e2:
            raise InvalidGrid("r_max / r_min must be >= 1e2")
        if int(self.points_per_decade) < 2:
            raise InvalidGrid("need at least two points per decade")
        if self.directions is not None and int(self.directions) < 1:
            raise InvalidGrid("direction count must be positive")

    @property
    def decades(self) -> float:
        return math.log10(self.r_max / self.r_min)

    def radii(self) -> np.ndarray:
        count = int(round(self.decades * self.points_per_decade)) + 1
        return np.logspace(math.log10(self.r_min), math.log10(self.r_max), count)

    @property
    def split_radius(self) -> float:
        """Geometric midpoint; the fit window is the upper half in log scale."""
        return math.sqrt(self.r_min * self.r_max)

    def window(self) -> np.ndarray:
        radii = self.radii()
        return radii >= self.split_radius * (1.0 - 1e-12)

    def direction_vectors(self, dimension: int) -> np.ndarray:
        if dimension == 1:
            return np.array([[1.0], [-1.0]])
        count = int(self.directions or default("grid_directions"))
        if dimension == 2:
            angles = 2.0 * np.pi * np.arange(count) / count
            return np.column_stack([np.cos(angles), np.sin(angles)])
        rng = np.random.default_rng(DIRECTION_SEED)
        vectors = rng.standard_normal((count, dimension))
        return vectors / np.linalg.norm(vectors, axis=1, keepdims=True)


class InvalidGrid(Exception):
    pass
