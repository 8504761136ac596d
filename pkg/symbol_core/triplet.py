"""Characteristic triplets (b, sigma, F) and their quadrature-backed symbols."""
import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from symbol_core.constants import Family, Truncation
from symbol_core.families import BrownianParams, DensityParams, _check_symmetric_psd, _flat
from symbol_core.utils import InvalidParams, as_matrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LevyTriplet:
    dimension: int
    drift: tuple
    sigma: tuple
    levy_measure: Optional[object] = field(default=None, compare=False)
    truncation: Truncation = Truncation.IDENTITY

    def __post_init__(self):
        if int(self.dimension) < 1:
            raise InvalidParams("dimension must be a positive integer")
        drift = _flat(self.drift)
        if len(drift) != self.dimension:
            raise InvalidParams(f"drift must have {self.dimension} entries")
        sigma = as_matrix(self.sigma, self.dimension, "sigma")
        _check_symmetric_psd(sigma, "sigma")
        object.__setattr__(self, "drift", drift)
        object.__setattr__(self, "sigma", _flat(sigma))
        object.__setattr__(self, "truncation", Truncation(self.truncation))
        if self.levy_measure is not None:
            if self.dimension != 1:
                raise InvalidParams("Levy densities are one-dimensional")
            if self.truncation is Truncation.IDENTITY:
                _check_identity_truncation(self.levy_measure)

    @property
    def sigma_matrix(self) -> np.ndarray:
        return np.asarray(self.sigma).reshape(self.dimension, self.dimension)


def _check_identity_truncation(density):
    """
    h(x) = x needs the large jumps to have a first moment. Only the
    antisymmetric part enters the symbol through h, so that is what is checked.
    """
    from levy_measure.quadrature import DivergentIntegral, check_first_moment, split_symmetric

    try:
        check_first_moment(split_symmetric(density))
    except DivergentIntegral as exc:
        raise InvalidParams(f"identity truncation not admissible: {exc}") from exc


def symbol_from_triplet(triplet: LevyTriplet):
    """A = 1/2 sigma xi^2 + i b xi + A_fs + A_fas, the density parts by quadrature."""
    from symbol_core.symbols import Symbol, make_symbol

    if triplet.levy_measure is None:
        return make_symbol(BrownianParams(sigma=triplet.sigma, drift=triplet.drift))

    from levy_measure.quadrature import split_symmetric, symbol_parts_from_density

    split = split_symmetric(triplet.levy_measure)
    sigma = float(triplet.sigma[0])
    drift = float(triplet.drift[0])
    truncation = triplet.truncation

    def evaluator(xi):
        u = xi[:, 0]
        out = np.empty(u.shape, dtype=complex)
        for k, value in enumerate(u):
            a_fs, a_fas = symbol_parts_from_density(split, float(value), truncation=truncation)
            out[k] = a_fs + a_fas
        return out + 0.5 * sigma * u ** 2 + 1j * drift * u

    params = DensityParams(
        density=triplet.levy_measure,
        drift=drift,
        sigma=sigma,
        truncation=truncation,
    )
    return Symbol(
        family=Family.FROM_DENSITY,
        dimension=1,
        params=params,
        evaluator=evaluator,
        closed_form=False,
        has_jumps=True,
        levy_density=triplet.levy_measure,
    )
