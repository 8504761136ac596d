"""Symbol profiles along rays and the log-log regressions run on them."""
import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from django.conf import settings
from scipy import stats

logger = logging.getLogger(__name__)


def worker_count() -> int:
    return max(int(getattr(settings, "LEVYSOBOLEV_THREADS", 1)), 1)


def ray_profiles(symbol, grid):
    """
    A(r e) for every direction e and radius r of the grid, shape (directions, radii).

    Directions are evaluated independently; ``map`` keeps their order, so the
    result does not depend on the worker count.
    """
    radii = grid.radii()
    directions = grid.direction_vectors(symbol.dimension)

    def along(direction):
        return symbol.evaluator(radii[:, None] * direction[None, :])

    workers = min(worker_count(), len(directions))
    if workers == 1:
        rows = [along(direction) for direction in directions]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(along, directions))
    profile = np.vstack(rows)
    logger.debug("profiles for %s: %s directions x %s radii", symbol.label, *profile.shape)
    return radii, directions, profile


def loglog_slope(x, y):
    """(slope, intercept, R^2, max residual) of log y on log x."""
    lx, ly = np.log(x), np.log(y)
    if len(lx) < 2:
        return float("nan"), float("nan"), 0.0, float("inf")
    fit = stats.linregress(lx, ly)
    residual = ly - (fit.intercept + fit.slope * lx)
    r_squared = float(fit.rvalue ** 2) if np.ptp(ly) > 0.0 else 1.0
    return float(fit.slope), float(fit.intercept), r_squared, float(np.max(np.abs(residual)))


def clean(value):
    """Plain JSON-ready copy: numpy scalars unwrapped, tuples as lists, non-finite floats as None."""
    if isinstance(value, dict):
        return {str(key): clean(item) for key, item in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [clean(item) for item in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if np.isfinite(value) else None
    return value
