"""
Symbols of Levy processes.

A ``Symbol`` wraps a vectorized evaluator ``(n, d) -> (n,)`` together with the
family record it was built from. Symbols are immutable; evaluation is a pure
function of the frequency.
"""
import logging
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np
from scipy import special

from symbol_core.constants import (
    CGMY_LIMIT_EPS,
    GROWTH_RADII,
    REAL_PART_FLOOR,
    SYMMETRY_RTOL,
    DriftConvention,
    Family,
    sanity_grid,
)
from symbol_core.families import (
    BrownianParams,
    CauchyParams,
    CGMYParams,
    DensityParams,
    GHParams,
    NIGParams,
    StableParams,
    StudentTParams,
)
from symbol_core.utils import (
    InvalidParams,
    as_frequencies,
    ensure_finite,
    log_bessel_k_normalized,
    restore_shape,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Symbol:
    family: Family
    dimension: int
    params: object
    evaluator: Callable = field(repr=False, compare=False)
    closed_form: bool = True
    has_jumps: bool = True
    levy_density: Optional[object] = field(default=None, repr=False, compare=False)
    components: tuple = field(default=(), repr=False)
    growth_constant: float = float("nan")

    def __call__(self, xi):
        return evaluate(self, xi)

    @property
    def label(self) -> str:
        if self.family is Family.SUM:
            return "+".join(part.label for part in self.components)
        return self.family.value


def evaluate(symbol: Symbol, xi):
    """A(xi) for a single frequency or a batch; bit-identical for equal input."""
    flat, shape, scalar = as_frequencies(xi, symbol.dimension)
    values = symbol.evaluator(flat)
    ensure_finite(values, f"eval[{symbol.label}]")
    return restore_shape(values, shape, scalar)


def char_fn(symbol: Symbol, t: float, xi):
    """mu_hat_t(xi) = exp(-t A(-xi))."""
    if not t > 0:
        raise InvalidParams(f"char_fn needs t > 0 (got {t})")
    flat, shape, scalar = as_frequencies(xi, symbol.dimension)
    values = np.exp(-t * symbol.evaluator(-flat))
    return restore_shape(values, shape, scalar)


def check_semistable_scaling(symbol: Symbol, a: float, b: float, c, grid) -> float:
    """max over the grid of |a A(u) - A(b u) - i <c, u>|."""
    flat, _, _ = as_frequencies(grid, symbol.dimension)
    if flat.shape[0] == 0:
        raise InvalidParams("semi-stable check needs a nonempty grid")
    shift = np.broadcast_to(np.asarray(c, dtype=float), (symbol.dimension,))
    residual = a * symbol.evaluator(flat) - symbol.evaluator(b * flat) - 1j * (flat @ shift)
    return float(np.max(np.abs(residual)))


# --- closed-form evaluators -------------------------------------------------

def _brownian(params: BrownianParams):
    sigma = params.sigma_matrix
    drift = np.asarray(params.drift)

    def evaluator(xi):
        quad = 0.5 * np.einsum("nj,jk,nk->n", xi, sigma, xi)
        return quad + 1j * (xi @ drift)

    return evaluator


def _nig(params: NIGParams):
    Delta = params.Delta_matrix
    beta = np.asarray(params.beta)
    mu = np.asarray(params.mu)
    base = np.sqrt(params.alpha ** 2 - beta @ Delta @ beta)

    def evaluator(xi):
        z = beta[None, :] - 1j * xi
        # bilinear, not Hermitian: sum_j z_j (Delta z)_j
        product = np.einsum("nj,jk,nk->n", z, Delta, z)
        root = np.sqrt(params.alpha ** 2 - product + 0j)
        return 1j * (xi @ mu) + params.delta * (root - base)

    return evaluator


def _cauchy(params: CauchyParams):
    gamma = np.asarray(params.gamma)

    def evaluator(xi):
        return params.c * np.linalg.norm(xi, axis=1) + 1j * (xi @ gamma)

    return evaluator


def _student_t(params: StudentTParams):
    order = params.f / 2.0

    def evaluator(xi):
        u = xi[:, 0]
        z = params.delta * np.abs(u)
        out = np.zeros(u.shape, dtype=complex)
        nonzero = z > 0.0
        zz = z[nonzero]
        out[nonzero] = -log_bessel_k_normalized(order, zz)
        return out + 1j * params.mu * u

    return evaluator


def cgmy_cumulant(params: CGMYParams, u):
    """
    Compensated cumulant log E exp(i u L_1) - i u E L_1 of the pure-jump CGMY law.

    Complex powers and logarithms use the principal branch; both bases M - iu
    and G + iu have real part M, G > 0, so the branch cut is never crossed.
    """
    C, G, M, Y = params.C, params.G, params.M, params.Y
    u = np.asarray(u, dtype=float)
    left = M - 1j * u
    right = G + 1j * u
    if np.any(left.real <= 0.0) or np.any(right.real <= 0.0):
        raise InvalidParams("CGMY power bases left the right half plane")
    if abs(Y) < CGMY_LIMIT_EPS:
        return -C * (np.log(left / M) + np.log(right / G) + 1j * u * (1.0 / M - 1.0 / G))
    if abs(Y - 1.0) < CGMY_LIMIT_EPS:
        return C * (left * np.log(left / M) + right * np.log(right / G))
    bracket = (
        left ** Y - M ** Y + right ** Y - G ** Y
        + Y * (M ** (Y - 1.0) - G ** (Y - 1.0)) * 1j * u
    )
    return C * special.gamma(-Y) * bracket


def _cgmy(params: CGMYParams):
    drift = params.drift

    def evaluator(xi):
        u = xi[:, 0]
        return 1j * drift * u - cgmy_cumulant(params, -u)

    return evaluator


def _stable(params: StableParams):
    alpha, c, beta, tau = params.alpha, params.c, params.beta, params.tau

    def evaluator(xi):
        u = xi[:, 0]
        magnitude = np.abs(u)
        sign = np.sign(u)
        if alpha == 1.0:
            log_u = np.log(np.where(magnitude > 0.0, magnitude, 1.0))
            core = c * magnitude * (1.0 - 1j * beta * (2.0 / np.pi) * sign * log_u)
        else:
            skew = 0.0 if alpha == 2.0 else beta * np.tan(np.pi * alpha / 2.0)
            core = c * magnitude ** alpha * (1.0 + 1j * skew * sign)
        return core + 1j * tau * u

    return evaluator


_EVALUATORS = {
    Family.BROWNIAN: _brownian,
    Family.NIG: _nig,
    Family.CAUCHY: _cauchy,
    Family.STUDENT_T: _student_t,
    Family.CGMY: _cgmy,
    Family.STABLE: _stable,
}


def _attached_density(params):
    """Levy density of a closed-form family when one is known in closed form."""
    from levy_measure import densities

    if isinstance(params, CGMYParams):
        return densities.cgmy_density(params.C, params.G, params.M, params.Y)
    if isinstance(params, NIGParams) and params.dimension == 1:
        scale = np.sqrt(params.Delta[0])
        return densities.nig_density(params.alpha / scale, params.beta[0], params.delta * scale)
    if isinstance(params, CauchyParams) and params.dimension == 1:
        return densities.cauchy_density(params.c)
    if isinstance(params, StableParams) and params.beta == 0.0 and params.alpha < 2.0:
        return densities.stable_density(params.alpha, params.c)
    return None


def _has_jumps(params) -> bool:
    if isinstance(params, BrownianParams):
        return False
    if isinstance(params, StableParams):
        return params.alpha < 2.0
    return True


def validate_symbol(symbol: Symbol) -> Symbol:
    """Run the sanity-grid checks and freeze the quadratic-bound constant."""
    grid = sanity_grid(symbol.dimension)
    values = symbol.evaluator(grid)
    mirrored = symbol.evaluator(-grid)
    ensure_finite(values, f"make_symbol[{symbol.label}]")
    ensure_finite(mirrored, f"make_symbol[{symbol.label}]")
    gap = np.abs(values - np.conj(mirrored))
    if np.any(gap > SYMMETRY_RTOL * (1.0 + np.abs(values))):
        raise InvalidParams(f"{symbol.label}: A(xi) != conj(A(-xi)) on the sanity grid")
    radius_sq = np.sum(grid ** 2, axis=1)
    if np.any(values.real < -REAL_PART_FLOOR * (1.0 + radius_sq)):
        raise InvalidParams(f"{symbol.label}: Re A < 0 on the sanity grid")

    direction = grid[: 1] / np.linalg.norm(grid[: 1])
    samples = np.concatenate([grid, GROWTH_RADII[:, None] * direction, -GROWTH_RADII[:, None] * direction])
    sampled = np.concatenate([values, symbol.evaluator(samples[len(grid):])])
    norms = np.linalg.norm(samples, axis=1)
    constant = float(np.max(np.abs(sampled) / (1.0 + norms) ** 2))
    logger.debug("symbol %s validated, growth constant %.6g", symbol.label, constant)
    return replace(symbol, growth_constant=constant)


def make_symbol(params) -> Symbol:
    """Build and validate the symbol for a family record."""
    if isinstance(params, GHParams):
        from levy_measure.densities import gh_expansion_density
        from symbol_core.triplet import LevyTriplet, symbol_from_triplet

        density = gh_expansion_density(params.C1, params.C2, params.C3, params.table_x, params.table_f)
        triplet = LevyTriplet(dimension=1, drift=(params.drift,), sigma=(0.0,), levy_measure=density)
        return validate_symbol(replace(symbol_from_triplet(triplet), family=Family.GH, params=params))
    elif isinstance(params, DensityParams):
        from symbol_core.triplet import LevyTriplet, symbol_from_triplet

        triplet = LevyTriplet(
            dimension=1,
            drift=(params.drift,),
            sigma=(params.sigma,),
            levy_measure=params.density,
            truncation=params.truncation,
        )
        return validate_symbol(replace(symbol_from_triplet(triplet), params=params))
    elif getattr(params, "family", None) not in _EVALUATORS:
        raise InvalidParams(f"unsupported parameter record {type(params).__name__}")

    symbol = Symbol(
        family=params.family,
        dimension=params.dimension,
        params=params,
        evaluator=_EVALUATORS[params.family](params),
        closed_form=True,
        has_jumps=_has_jumps(params),
        levy_density=_attached_density(params),
    )
    return validate_symbol(symbol)


def stable_symbol_1d(params: StableParams) -> Symbol:
    if not isinstance(params, StableParams):
        raise InvalidParams("stable_symbol_1d expects a StableParams record")
    return make_symbol(params)


def sum_symbol(first: Symbol, second: Symbol) -> Symbol:
    """Symbol of the sum of two independent processes: A1 + A2."""
    if first.dimension != second.dimension:
        raise InvalidParams("summed symbols must share the dimension")

    def evaluator(xi):
        return first.evaluator(xi) + second.evaluator(xi)

    symbol = Symbol(
        family=Family.SUM,
        dimension=first.dimension,
        params=(first.params, second.params),
        evaluator=evaluator,
        closed_form=first.closed_form and second.closed_form,
        has_jumps=first.has_jumps or second.has_jumps,
        components=(first, second),
    )
    return validate_symbol(symbol)


def scaled_symbol(symbol: Symbol, factor: float) -> Symbol:
    """factor * A, the symbol of the process run at speed ``factor``."""
    if not factor > 0:
        raise InvalidParams("time change factor must be > 0")

    def evaluator(xi):
        return factor * symbol.evaluator(xi)

    return replace(
        symbol,
        evaluator=evaluator,
        levy_density=None,
        growth_constant=factor * symbol.growth_constant,
    )
