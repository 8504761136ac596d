"""
Parameter records for the process families with a closed-form symbol.

Records validate themselves on construction and raise ``InvalidParams`` naming
the violated constraint, so an existing record always satisfies its invariants.
"""
from dataclasses import dataclass, field
from typing import ClassVar, Optional

import numpy as np
from scipy import special

from symbol_core.constants import DriftConvention, Family, Truncation
from symbol_core.utils import InvalidParams, as_matrix, as_vector

SYMMETRY_ATOL = 1e-12


def _flat(value) -> tuple:
    return tuple(float(v) for v in np.atleast_1d(np.asarray(value, dtype=float)).ravel())


def _check_symmetric_psd(matrix: np.ndarray, name: str, strict: bool = False):
    if not np.all(np.isfinite(matrix)):
        raise InvalidParams(f"{name} must be finite")
    if np.max(np.abs(matrix - matrix.T)) > SYMMETRY_ATOL:
        raise InvalidParams(f"{name} must be symmetric")
    eigenvalues = np.linalg.eigvalsh(0.5 * (matrix + matrix.T))
    if strict and eigenvalues.min() <= 0.0:
        raise InvalidParams(f"{name} must be positive definite")
    if eigenvalues.min() < -SYMMETRY_ATOL:
        raise InvalidParams(f"{name} must be positive semidefinite")


def _positive(value, name: str) -> float:
    value = float(value)
    if not np.isfinite(value) or value <= 0.0:
        raise InvalidParams(f"{name} must be > 0 (got {value})")
    return value


@dataclass(frozen=True)
class BrownianParams:
    family: ClassVar[Family] = Family.BROWNIAN

    sigma: tuple = (1.0,)
    drift: tuple = (0.0,)

    def __post_init__(self):
        drift = _flat(self.drift)
        dimension = len(drift)
        sigma = as_matrix(self.sigma, dimension, "sigma")
        _check_symmetric_psd(sigma, "sigma")
        object.__setattr__(self, "drift", drift)
        object.__setattr__(self, "sigma", _flat(sigma))

    @property
    def dimension(self) -> int:
        return len(self.drift)

    @property
    def sigma_matrix(self) -> np.ndarray:
        return np.asarray(self.sigma).reshape(self.dimension, self.dimension)


@dataclass(frozen=True)
class NIGParams:
    family: ClassVar[Family] = Family.NIG

    alpha: float = 1.0
    beta: tuple = (0.0,)
    delta: float = 1.0
    mu: Optional[tuple] = None
    Delta: Optional[tuple] = None

    def __post_init__(self):
        beta = _flat(self.beta)
        dimension = len(beta)
        alpha = _positive(self.alpha, "alpha")
        delta = _positive(self.delta, "delta")
        mu = as_vector(0.0 if self.mu is None else self.mu, dimension, "mu")
        Delta = as_matrix(1.0 if self.Delta is None else self.Delta, dimension, "Delta")
        _check_symmetric_psd(Delta, "Delta", strict=True)
        b = np.asarray(beta)
        if alpha ** 2 <= float(b @ Delta @ b):
            raise InvalidParams("NIG requires alpha^2 > <beta, Delta beta>")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "mu", _flat(mu))
        object.__setattr__(self, "Delta", _flat(Delta))

    @property
    def dimension(self) -> int:
        return len(self.beta)

    @property
    def Delta_matrix(self) -> np.ndarray:
        return np.asarray(self.Delta).reshape(self.dimension, self.dimension)


@dataclass(frozen=True)
class CauchyParams:
    family: ClassVar[Family] = Family.CAUCHY

    c: float = 1.0
    gamma: tuple = (0.0,)

    def __post_init__(self):
        object.__setattr__(self, "c", _positive(self.c, "c"))
        object.__setattr__(self, "gamma", _flat(self.gamma))

    @property
    def dimension(self) -> int:
        return len(self.gamma)


@dataclass(frozen=True)
class StudentTParams:
    family: ClassVar[Family] = Family.STUDENT_T
    dimension: ClassVar[int] = 1

    f: float = 4.0
    delta: float = 1.0
    mu: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "f", _positive(self.f, "f"))
        object.__setattr__(self, "delta", _positive(self.delta, "delta"))
        object.__setattr__(self, "mu", float(self.mu))


@dataclass(frozen=True)
class CGMYParams:
    family: ClassVar[Family] = Family.CGMY
    dimension: ClassVar[int] = 1

    C: float = 1.0
    G: float = 5.0
    M: float = 5.0
    Y: float = 0.5
    drift_convention: Optional[DriftConvention] = None

    def __post_init__(self):
        for name in ("C", "G", "M"):
            object.__setattr__(self, name, _positive(getattr(self, name), name))
        Y = float(self.Y)
        if not (0.0 <= Y < 2.0):
            raise InvalidParams(f"CGMY requires 0 <= Y < 2 (got Y={Y})")
        object.__setattr__(self, "Y", Y)
        convention = self.drift_convention
        if convention is None:
            convention = DriftConvention.FINITE_VARIATION if Y < 1.0 else DriftConvention.ZERO
        convention = DriftConvention(convention)
        if convention is DriftConvention.FINITE_VARIATION and Y >= 1.0:
            raise InvalidParams("finite_variation drift requires Y < 1")
        object.__setattr__(self, "drift_convention", convention)

    @property
    def drift(self) -> float:
        """
        Drift w.r.t. h(x)=x: the mean jump size for finite variation, else zero.

        The mean of the CGMY jumps is C Gamma(1-Y) (M^(Y-1) - G^(Y-1)); the bare
        factor Y in place of Gamma(1-Y) is the compensator coefficient of the
        cumulant after its C Gamma(-Y) prefactor, not the drift itself.
        """
        if self.drift_convention is DriftConvention.ZERO:
            return 0.0
        if self.Y == 0.0:
            return self.C * (1.0 / self.M - 1.0 / self.G)
        return self.C * special.gamma(1.0 - self.Y) * (self.M ** (self.Y - 1.0) - self.G ** (self.Y - 1.0))


@dataclass(frozen=True)
class StableParams:
    family: ClassVar[Family] = Family.STABLE
    dimension: ClassVar[int] = 1

    alpha: float = 1.0
    c: float = 1.0
    beta: float = 0.0
    tau: float = 0.0

    def __post_init__(self):
        alpha = float(self.alpha)
        if not (0.0 < alpha <= 2.0):
            raise InvalidParams(f"stable index alpha must lie in (0, 2] (got {alpha})")
        beta = float(self.beta)
        if not (-1.0 <= beta <= 1.0):
            raise InvalidParams(f"stable skewness beta must lie in [-1, 1] (got {beta})")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "c", _positive(self.c, "c"))
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "tau", float(self.tau))

    @property
    def strict(self) -> bool:
        if self.alpha == 1.0:
            return self.beta == 0.0
        return self.tau == 0.0


@dataclass(frozen=True)
class GHParams:
    """
    Generalised hyperbolic law known through its Levy density only.

    ``C1/x^2 + C2/|x| + C3/x`` describes the density near zero; ``table_x`` and
    ``table_f`` carry user-supplied values of the full density.
    """
    family: ClassVar[Family] = Family.GH
    dimension: ClassVar[int] = 1

    C1: float = 1.0
    C2: float = 0.0
    C3: float = 0.0
    table_x: tuple = ()
    table_f: tuple = ()
    drift: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "C1", _positive(self.C1, "C1"))
        object.__setattr__(self, "C2", float(self.C2))
        object.__setattr__(self, "C3", float(self.C3))
        table_x = _flat(self.table_x) if len(self.table_x) else ()
        table_f = _flat(self.table_f) if len(self.table_f) else ()
        if len(table_x) == 0 or len(table_x) != len(table_f):
            raise InvalidParams("GH needs a density table with matching x and f columns")
        object.__setattr__(self, "table_x", table_x)
        object.__setattr__(self, "table_f", table_f)
        object.__setattr__(self, "drift", float(self.drift))


@dataclass(frozen=True)
class DensityParams:
    """Triplet given through a Levy density (1-d)."""
    family: ClassVar[Family] = Family.FROM_DENSITY
    dimension: ClassVar[int] = 1

    density: object = None
    drift: float = 0.0
    sigma: float = 0.0
    truncation: Truncation = Truncation.IDENTITY
    label: str = field(default="density", compare=False)

    def __post_init__(self):
        if self.density is None:
            raise InvalidParams("a Levy density is required")
        if float(self.sigma) < 0.0:
            raise InvalidParams("sigma must be >= 0")
        object.__setattr__(self, "drift", float(self.drift))
        object.__setattr__(self, "sigma", float(self.sigma))
        object.__setattr__(self, "truncation", Truncation(self.truncation))


CLOSED_FORM = (BrownianParams, NIGParams, CauchyParams, StudentTParams, CGMYParams, StableParams)
ALL_PARAMS = CLOSED_FORM + (GHParams, DensityParams)
