"""CSV writers for trajectories, prices and densities."""
import csv
import logging

import numpy as np

logger = logging.getLogger(__name__)


def header_lines(header: dict) -> list:
    return [f"# {key}={value}" for key, value in (header or {}).items()]


def write_csv(path, rows, fieldnames, header: dict = None):
    """``rows`` are dicts; floats are written with ``repr`` so the files do not depend on the locale."""
    with open(path, "w", encoding="utf-8", newline="") as f:
        for line in header_lines(header):
            f.write(line + "\n")
        w = csv.DictWriter(f, fieldnames=fieldnames, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({key: _cell(value) for key, value in row.items()})
    logger.debug("wrote %s", path)


def _cell(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return int(value)
    return value


def trajectory_rows(trajectory, every: int = 1):
    """One row per recorded time and mode: t, xi (one column per axis), real, imag."""
    grid = trajectory.grid
    xi = grid.frequencies().reshape(-1, grid.dimension)
    axes = ["xi"] if grid.dimension == 1 else [f"xi{i + 1}" for i in range(grid.dimension)]
    picked = sorted(set(range(0, len(trajectory.times), max(int(every), 1))) | {len(trajectory.times) - 1})
    rows = []
    for index in picked:
        t = trajectory.times[index]
        values = trajectory.fields[index].coefficients.reshape(-1)
        for point, value in zip(xi, values):
            row = {"t": t, "real": value.real, "imag": value.imag}
            row.update(zip(axes, point))
            rows.append(row)
    return rows, ["t"] + axes + ["real", "imag"]


def value_rows(x_points, values):
    """(x, value) rows; complex values split into real and imag columns."""
    points = np.asarray(x_points, dtype=float)
    values = np.asarray(values)
    axes = ["x"] if points.ndim == 1 else [f"x{i + 1}" for i in range(points.shape[1])]
    columns = ["real", "imag"] if np.iscomplexobj(values) else ["value"]
    rows = []
    for point, value in zip(points.reshape(len(values), -1), values):
        row = dict(zip(axes, point))
        if np.iscomplexobj(values):
            row.update(real=value.real, imag=value.imag)
        else:
            row["value"] = value
        rows.append(row)
    return rows, axes + columns
