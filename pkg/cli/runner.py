"""
Task pipelines behind ``manage.py levysobolev``.

Each task writes its files into the output directory and reports one summary
line per stage. Failures come out as ``StageFailed`` carrying the exit code:
2 for configuration problems, 1 for numerical ones.
"""
import copy
import logging
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from django.conf import settings
from rest_framework import serializers

from cli.config import Payoff, RunConfig, Task
from cli.plot_data import EmptyResult, SpatialSeries, emit_plot_data, symbol_profile
from index_lab.catalog import UnknownFamily, catalog
from index_lab.checks import MissingField
from index_lab.grids import InvalidGrid
from index_lab.serializers import render_json, report_to_json
from index_lab.smoothness import TailUnbounded
from index_lab.sobolev import DegenerateSymbol, NonpositiveRealPart, sobolev_index
from levy_measure.indices import FitUnstable, Inconsistent
from levy_measure.quadrature import DivergentIntegral, NotOneDimensional, QuadratureFailure
from spectral_solver.evolution import UnstableScheme, evolve
from spectral_solver.exports import trajectory_rows, write_csv
from spectral_solver.forms import verify_form_inequalities
from spectral_solver.grids import GridMismatch
from spectral_solver.inversion import TailTooFat, conditional_expectation, density, density_on_window
from spectral_solver.payoffs import gaussian_payoff, hermite_payoff
from spectral_solver.serializers import form_report_to_json
from symbol_core.serializers import record_from_params
from symbol_core.symbols import make_symbol
from symbol_core.utils import EvalOverflow, InvalidParams

logger = logging.getLogger(__name__)

CONFIG_ERRORS = (serializers.ValidationError, InvalidParams, InvalidGrid, UnknownFamily)
NUMERICAL_ERRORS = (
    QuadratureFailure, DivergentIntegral, NotOneDimensional, FitUnstable, Inconsistent,
    DegenerateSymbol, NonpositiveRealPart, TailUnbounded, MissingField, GridMismatch,
    UnstableScheme, TailTooFat, EvalOverflow, EmptyResult, OSError,
)
DEFAULT_XI = np.linspace(-10.0, 10.0, 41)
DEFAULT_X = np.linspace(-5.0, 5.0, 101)


@dataclass(frozen=True)
class RunResult:
    task: Task
    files: tuple
    summaries: tuple


def defaults_header() -> dict:
    return copy.deepcopy(settings.LEVYSOBOLEV_DEFAULTS)


class _Stages:
    def __init__(self, report):
        self.report = report or (lambda line: logger.info("%s", line))
        self.lines = []

    @contextmanager
    def stage(self, name):
        try:
            yield
        except CONFIG_ERRORS as exc:
            raise StageFailed(name, _message(exc), 2) from exc
        except NUMERICAL_ERRORS as exc:
            raise StageFailed(name, f"{type(exc).__name__}: {exc}", 1) from exc

    def note(self, name, text):
        line = f"{name}: {text}"
        self.lines.append(line)
        self.report(line)


def _message(exc) -> str:
    if isinstance(exc, serializers.ValidationError):
        return str(exc.detail)
    return str(exc)


def _points(values, dimension, default):
    points = np.asarray(default if values is None else values, dtype=float)
    if dimension == 1:
        return points
    if values is None:
        return np.column_stack([points] + [np.zeros_like(points)] * (dimension - 1))
    if points.size % dimension:
        raise InvalidParams(f"point list length {points.size} is not a multiple of d={dimension}")
    return points.reshape(-1, dimension)


def _payoff(config: RunConfig, grid):
    options = config.options
    if options["payoff"] is Payoff.HERMITE:
        return hermite_payoff(grid, options["payoff_order"], options["payoff_mean"], options["payoff_scale"])
    return gaussian_payoff(grid, options["payoff_amplitude"], options["payoff_mean"], options["payoff_scale"])


def _symbol_eval(config, symbol, out, header, stages):
    with stages.stage("symbol-eval"):
        xi = _points(config.options["xi"], symbol.dimension, DEFAULT_XI)
        values = symbol(xi)
    axes = ["xi"] if symbol.dimension == 1 else [f"xi{i + 1}" for i in range(symbol.dimension)]
    rows = []
    for point, value in zip(xi.reshape(len(values), -1), values):
        row = dict(zip(axes, point))
        row.update(real=value.real, imag=value.imag)
        rows.append(row)
    path = out / "symbol.csv"
    with stages.stage("write"):
        write_csv(path, rows, axes + ["real", "imag"], header=header)
    stages.note("symbol-eval", f"{len(rows)} frequencies")
    return [path]


def _index(config, symbol, out, header, stages):
    grid = config.index_grid()
    with stages.stage("index"):
        report = sobolev_index(symbol, grid, config.options["index_tol"])
    stages.note("index", f"sobolev_index={report.sobolev_index} alpha_cont={report.alpha_cont} "
                         f"alpha_gard={report.alpha_gard} beta={report.beta} gamma={report.gamma}")
    report_path, plot_path = out / "index_report.json", out / "index_plot.csv"
    with stages.stage("write"):
        report_path.write_bytes(report_to_json(report, header))
        emit_plot_data(symbol_profile(symbol, grid), plot_path, header)
    return [report_path, plot_path]


def _inequalities(config, symbol, out, header, stages):
    options = config.options
    with stages.stage("inequalities"):
        report = verify_form_inequalities(
            symbol, options["alpha"], trials=options["trials"],
            grid=config.frequency_grid(symbol.dimension), seed=config.seed, rays=config.index_grid(),
        )
    stages.note("inequalities", f"continuity={report.continuity_passed} garding={report.garding_passed} "
                                f"c2={report.garding_c2:.6g} c3={report.garding_c3:.6g}")
    path = out / "form_report.json"
    with stages.stage("write"):
        path.write_bytes(form_report_to_json(report, header))
    return [path]


def _evolve(config, symbol, out, header, stages):
    options = config.options
    with stages.stage("evolve"):
        g_hat = _payoff(config, config.frequency_grid(symbol.dimension))
        trajectory = evolve(symbol, g_hat, None, options["T"], options["K"], options["scheme"])
    stages.note("evolve", f"scheme={options['scheme'].value} T={options['T']} K={options['K']}")
    rows, fieldnames = trajectory_rows(trajectory, every=options["record_every"] or options["K"])
    path = out / "trajectory.csv"
    with stages.stage("write"):
        write_csv(path, rows, fieldnames, header=header)
    return [path]


def _price(config, symbol, out, header, stages):
    options = config.options
    with stages.stage("price"):
        x = _points(options["x"], symbol.dimension, DEFAULT_X)
        g_hat = _payoff(config, config.frequency_grid(symbol.dimension))
        values = conditional_expectation(symbol, g_hat, options["tau"], x)
    stages.note("price", f"{len(values)} points at tau={options['tau']}")
    path = out / "price.csv"
    with stages.stage("write"):
        emit_plot_data(SpatialSeries(x, values), path, header)
    return [path]


def _density(config, symbol, out, header, stages):
    options = config.options
    grid = config.frequency_grid(symbol.dimension)
    with stages.stage("density"):
        if symbol.dimension != 1:
            raise InvalidParams("the density task writes one-dimensional windows")
        axis, window = density_on_window(symbol, options["t"], grid)
        inside = np.abs(axis) <= options["x_max"]
        plot = SpatialSeries(axis[inside], window[inside])
        if options["x"] is None:
            values = plot
        else:
            x = _points(options["x"], 1, DEFAULT_X)
            values = SpatialSeries(x, density(symbol, options["t"], x, grid))
    mass = float(np.sum(window) * (axis[1] - axis[0]))
    stages.note("density", f"t={options['t']} mass={mass:.8f} min={float(np.min(window)):.3e}")
    paths = [out / "density.csv", out / "density_plot.csv"]
    with stages.stage("write"):
        emit_plot_data(values, paths[0], header)
        emit_plot_data(plot, paths[1], header)
    return paths


def _catalog(config, symbol, out, header, stages):
    with stages.stage("catalog"):
        entries = catalog()
    records = [
        {
            "case": entry.case,
            "family": entry.family.value,
            "analytic_index": entry.index,
            "params": None if entry.params is None else record_from_params(entry.params),
        }
        for entry in entries
    ]
    stages.note("catalog", f"{len(records)} entries")
    json_path, csv_path = out / "catalog.json", out / "catalog.csv"
    with stages.stage("write"):
        json_path.write_bytes(render_json({"defaults": header, "entries": records}))
        write_csv(csv_path, records, ["case", "family", "analytic_index"], header=header)
    return [json_path, csv_path]


_TASKS = {
    Task.SYMBOL_EVAL: _symbol_eval,
    Task.INDEX: _index,
    Task.INEQUALITIES: _inequalities,
    Task.EVOLVE: _evolve,
    Task.PRICE: _price,
    Task.DENSITY: _density,
    Task.CATALOG: _catalog,
}


def run(config: RunConfig, out_dir, report=None) -> RunResult:
    """Run one task; ``report`` receives the per-stage summary lines."""
    stages = _Stages(report)
    out = Path(out_dir)
    with stages.stage("output"):
        out.mkdir(parents=True, exist_ok=True)
    symbol = None
    if config.params is not None:
        with stages.stage("symbol"):
            symbol = make_symbol(config.params)
        stages.note("symbol", f"{symbol.label} d={symbol.dimension}")
    files = _TASKS[config.task](config, symbol, out, defaults_header(), stages)
    return RunResult(task=config.task, files=tuple(files), summaries=tuple(stages.lines))


# Custom exceptions
class StageFailed(Exception):
    def __init__(self, stage, message, returncode):
        super().__init__(f"{stage}: {message}")
        self.stage = stage
        self.returncode = returncode
