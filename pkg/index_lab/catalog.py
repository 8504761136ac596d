"""Sobolev indices known in closed form, per family."""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from symbol_core.constants import DriftConvention, Family
from symbol_core.families import (
    BrownianParams,
    CauchyParams,
    CGMYParams,
    NIGParams,
    StableParams,
    StudentTParams,
)

logger = logging.getLogger(__name__)


def _brownian_index(params) -> Optional[float]:
    eigenvalues = np.linalg.eigvalsh(params.sigma_matrix)
    return 2.0 if eigenvalues.min() > 0.0 else None


def _cgmy_index(params) -> Optional[float]:
    if params.Y == 0.0:
        return None
    if params.Y < 1.0:
        # the drift must cancel the |u| term of the compensated cumulant
        balanced = params.drift_convention is DriftConvention.FINITE_VARIATION or params.G == params.M
        return params.Y if balanced else None
    return params.Y


def _stable_index(params) -> Optional[float]:
    if params.alpha > 1.0:
        return params.alpha
    if params.alpha == 1.0:
        return 1.0 if params.beta == 0.0 else None
    return params.alpha if params.tau == 0.0 else None


_INDEX_RULES = {
    Family.BROWNIAN: _brownian_index,
    Family.NIG: lambda params: 1.0,
    Family.CAUCHY: lambda params: 1.0,
    Family.STUDENT_T: lambda params: 1.0,
    Family.GH: lambda params: 1.0,
    Family.CGMY: _cgmy_index,
    Family.STABLE: _stable_index,
}


def analytic_index(params) -> Optional[float]:
    """The known Sobolev index of a parameter record, or None where the family has none."""
    rule = _INDEX_RULES.get(getattr(params, "family", None))
    if rule is None:
        raise UnknownFamily(f"no analytic index for {type(params).__name__}")
    return rule(params)


@dataclass(frozen=True)
class CatalogEntry:
    case: str
    family: Family
    params: Optional[object]
    index: Optional[float]


def catalog() -> list:
    """Reference cases with their analytic indices, in a fixed order."""
    cases = [
        ("brownian", BrownianParams(sigma=1.0, drift=0.0)),
        ("nig", NIGParams(alpha=10.0, beta=3.0, delta=1.0, mu=0.0)),
        ("cauchy", CauchyParams(c=1.0, gamma=0.0)),
        ("student_t", StudentTParams(f=4.0, delta=1.0, mu=0.0)),
    ]
    for Y in (0.0, 0.5, 1.0, 1.2, 1.5, 1.8):
        cases.append((f"cgmy_Y{Y:g}", CGMYParams(C=1.0, G=5.0, M=5.0, Y=Y)))
    for alpha in (0.3, 0.7, 1.0, 1.6):
        cases.append((f"stable_{alpha:g}", StableParams(alpha=alpha, c=1.0, beta=0.0, tau=0.0)))
    cases.append(("stable_1_skewed", StableParams(alpha=1.0, c=1.0, beta=0.5, tau=0.0)))

    entries = [
        CatalogEntry(case=case, family=params.family, params=params, index=analytic_index(params))
        for case, params in cases
    ]
    # GH laws are only known through a density table, so no record is built here.
    entries.append(CatalogEntry(case="gh", family=Family.GH, params=None, index=1.0))
    logger.debug("catalog with %s entries", len(entries))
    return entries


# Custom exceptions
class UnknownFamily(Exception):
    pass
