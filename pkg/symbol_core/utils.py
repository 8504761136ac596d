"""Array plumbing and special functions used by the symbol evaluators."""
import logging

import numpy as np
from django.conf import settings
from scipy import special

logger = logging.getLogger(__name__)


def default(key: str):
    """Entry of the project defaults table (echoed into every output header)."""
    return settings.LEVYSOBOLEV_DEFAULTS[key]


def as_frequencies(xi, dimension: int):
    """
    Coerce ``xi`` into an ``(n, d)`` float array.

    Returns the array, the batch shape to restore and whether the input was a
    single frequency. In one dimension scalars and flat arrays are accepted;
    in higher dimensions the last axis must have length ``d``.
    """
    arr = np.asarray(xi, dtype=float)
    if dimension == 1:
        if arr.ndim >= 1 and arr.shape[-1] == 1 and arr.ndim > 1:
            arr = arr[..., 0]
        shape = arr.shape
        flat = arr.reshape(-1, 1)
        return flat, shape, arr.ndim == 0
    if arr.shape[-1] != dimension:
        raise InvalidParams(
            f"frequency has trailing dimension {arr.shape[-1]}, symbol dimension is {dimension}"
        )
    shape = arr.shape[:-1]
    flat = arr.reshape(-1, dimension)
    return flat, shape, arr.ndim == 1


def restore_shape(values, shape, scalar: bool):
    out = np.asarray(values, dtype=complex).reshape(shape)
    if scalar:
        return complex(out)
    return out


def ensure_finite(values, where: str):
    values = np.asarray(values)
    if not np.all(np.isfinite(values)):
        raise EvalOverflow(f"{where}: non-finite symbol value")
    return values


def log_bessel_k(nu: float, z):
    """
    log K_nu(z) for z > 0, stable for large z through the scaled kve.

    Where kve itself overflows (large order, small argument) the logarithm is
    taken from ``log_bessel_k_large_order`` instead.
    """
    z = np.asarray(z, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        scaled = special.kve(nu, z)
    usable = np.isfinite(scaled) & (scaled > 0.0)
    out = np.empty(z.shape, dtype=float)
    out[usable] = np.log(scaled[usable]) - z[usable]
    if not np.all(usable):
        out[~usable] = log_bessel_k_large_order(nu, z[~usable])
    if not np.all(np.isfinite(out)):
        raise EvalOverflow(f"Bessel K_{nu} left the representable range")
    return out


# Terms of the Debye expansion K_nu(nu x) ~ sqrt(pi/(2 nu)) e^(-nu eta) (1+x^2)^(-1/4) sum (-1)^k u_k(p) / nu^k,
# as polynomial coefficients in p = (1+x^2)^(-1/2), lowest power first.
_DEBYE = (
    ((0.0, 3.0, 0.0, -5.0), 24.0),
    ((0.0, 0.0, 81.0, 0.0, -462.0, 0.0, 385.0), 1152.0),
    ((0.0, 0.0, 0.0, 30375.0, 0.0, -369603.0, 0.0, 765765.0, 0.0, -425425.0), 414720.0),
    ((0.0, 0.0, 0.0, 0.0, 4465125.0, 0.0, -94121676.0, 0.0, 349922430.0, 0.0, -446185740.0, 0.0, 185910725.0),
     39813120.0),
)
SERIES_TERMS = 80
# From this order on, the (z/2)^nu branch of the series for K_nu is below
# double precision wherever z^2 < nu.
SERIES_MIN_ORDER = 20.0


def _ascending_log1p(nu: float, z):
    """log of the sum over k < nu of (-z^2/4)^k Gamma(nu-k) / (k! Gamma(nu))."""
    step = -0.25 * z * z
    term = np.ones_like(z)
    total = np.zeros_like(z)
    k = 1
    while k < nu and k <= SERIES_TERMS:
        term = term * step / (k * (nu - k))
        total += term
        if np.all(np.abs(term) < 1e-17 * np.abs(1.0 + total)):
            break
        k += 1
    return np.log1p(total)


def log_bessel_k_large_order(nu: float, z):
    """
    log K_nu(z) without forming K_nu, for orders where K_nu(z) overflows.

    For z^2 < nu the ascending series around
    log Gamma(nu) + nu log(2/z) - log 2 is used; the (z/2)^nu branch of the
    series is below double precision whenever K_nu overflows. Larger z use the
    uniform Debye expansion in nu.
    """
    z = np.asarray(z, dtype=float)
    out = np.empty(z.shape, dtype=float)
    small = z * z < nu
    if np.any(small):
        zs = z[small]
        out[small] = special.gammaln(nu) + nu * np.log(2.0 / zs) - np.log(2.0) + _ascending_log1p(nu, zs)
    if np.any(~small):
        x = z[~small] / nu
        root = np.hypot(1.0, x)
        p = 1.0 / root
        eta = root + np.log(x / (1.0 + root))
        correction = np.ones_like(x)
        for k, (coefficients, scale) in enumerate(_DEBYE, start=1):
            correction += (-1.0) ** k * np.polynomial.polynomial.polyval(p, coefficients) / scale / nu ** k
        out[~small] = 0.5 * np.log(np.pi / (2.0 * nu)) - nu * eta - 0.5 * np.log(root) + np.log(correction)
    return out


def log_bessel_k_normalized(nu: float, z):
    """
    log of K_nu(z) z^nu / (Gamma(nu) 2^(nu-1)), which tends to 0 as z -> 0.

    Large orders at small z are summed directly so the leading terms cancel
    analytically instead of in floating point.
    """
    z = np.asarray(z, dtype=float)
    out = np.empty(z.shape, dtype=float)
    series = (z * z < nu) if nu >= SERIES_MIN_ORDER else np.zeros(z.shape, dtype=bool)
    if np.any(series):
        out[series] = _ascending_log1p(nu, z[series])
    if np.any(~series):
        rest = z[~series]
        out[~series] = (
            log_bessel_k(nu, rest) + nu * np.log(rest) - special.gammaln(nu) - (nu - 1.0) * np.log(2.0)
        )
    return out


def as_matrix(value, dimension: int, name: str) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        arr = arr * np.eye(dimension)
    elif arr.size == dimension * dimension:
        arr = arr.reshape(dimension, dimension)
    else:
        raise InvalidParams(f"{name} must be a {dimension}x{dimension} matrix")
    return arr


def as_vector(value, dimension: int, name: str) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(value, dtype=float))
    if arr.size == 1 and dimension > 1:
        arr = np.full(dimension, float(arr[0]))
    if arr.shape != (dimension,):
        raise InvalidParams(f"{name} must have {dimension} entries")
    return arr


# Custom exceptions
class InvalidParams(Exception):
    pass


class EvalOverflow(Exception):
    pass
