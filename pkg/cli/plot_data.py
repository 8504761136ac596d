"""Plot-ready CSV data: log-log symbol profiles and (x, value) series."""
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from index_lab.fitting import ray_profiles
from spectral_solver.exports import value_rows, write_csv

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SymbolProfile:
    """A(r e) along the first direction of an index grid."""
    radii: np.ndarray
    values: np.ndarray

    def __len__(self):
        return len(self.radii)


@dataclass(frozen=True, eq=False)
class SpatialSeries:
    x: np.ndarray
    values: np.ndarray

    def __len__(self):
        return len(self.values)


def symbol_profile(symbol, grid) -> SymbolProfile:
    radii, _, profile = ray_profiles(symbol, grid)
    return SymbolProfile(radii=radii, values=profile[0])


def _profile_rows(result: SymbolProfile):
    modulus = np.abs(result.values)
    real_part = result.values.real
    keep = (modulus > 0.0) & (real_part > 0.0)
    rows = [
        {"log_abs_xi": lr, "log_abs_A": lm, "log_re_A": lre}
        for lr, lm, lre in zip(np.log(result.radii[keep]), np.log(modulus[keep]), np.log(real_part[keep]))
    ]
    return rows, ["log_abs_xi", "log_abs_A", "log_re_A"]


def emit_plot_data(result, path, header: dict = None) -> Path:
    """
    Write ``result`` as plot data. Profiles give (log|xi|, log|A|, log Re A),
    spatial series give (x, value). Nothing is written for an empty result.
    """
    if result is None or len(result) == 0:
        raise EmptyResult(f"emit_plot_data: nothing to write to {path}")
    if isinstance(result, SymbolProfile):
        rows, fieldnames = _profile_rows(result)
    elif isinstance(result, SpatialSeries):
        rows, fieldnames = value_rows(result.x, result.values)
    else:
        raise TypeError(f"emit_plot_data cannot plot {type(result).__name__}")
    if not rows:
        raise EmptyResult(f"emit_plot_data: no plottable points for {path}")
    path = Path(path)
    write_csv(path, rows, fieldnames, header=header)
    logger.debug("plot data: %s rows to %s", len(rows), path)
    return path


# Custom exceptions
class EmptyResult(Exception):
    pass
