import csv
import io
import math
import tempfile
from pathlib import Path

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase
from rest_framework import serializers

from cli.config import Payoff, Task, load_run_config
from cli.plot_data import EmptyResult, SpatialSeries, emit_plot_data, symbol_profile
from index_lab.grids import GridSpec
from index_lab.serializers import parse_json, report_from_json
from index_lab.sobolev import sobolev_index
from levy_measure.densities import cgmy_density
from spectral_solver.evolution import Scheme
from spectral_solver.serializers import form_report_from_json
from symbol_core.families import CauchyParams, CGMYParams
from symbol_core.symbols import make_symbol

CGMY_RUN = """
# CGMY reference case
task=index
process.family=cgmy
process.C=1
process.G=5
process.M=5
process.Y=1.5
"""


def write_run(directory, text):
    path = Path(directory) / "run.env"
    path.write_text(text, encoding="utf-8")
    return path


def read_rows(path):
    with open(path, encoding="utf-8") as f:
        lines = [line for line in f if not line.startswith("#")]
    return list(csv.DictReader(lines))


def levysobolev(*args, **options):
    stdout, stderr = io.StringIO(), io.StringIO()
    call_command("levysobolev", *args, stdout=stdout, stderr=stderr, **options)
    return stdout.getvalue(), stderr.getvalue()


class RunConfigTests(SimpleTestCase):
    def test_run_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            config = load_run_config(write_run(tmp, CGMY_RUN))
        self.assertIs(config.task, Task.INDEX)
        self.assertEqual(config.seed, 0)
        self.assertIsInstance(config.params, CGMYParams)
        self.assertEqual(config.params.Y, 1.5)
        self.assertEqual(config.options["grid_r_max"], 1e6)
        self.assertIs(config.options["scheme"], Scheme.EXACT)
        self.assertIs(config.options["payoff"], Payoff.GAUSSIAN)

    def test_flags_override_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            config = load_run_config(
                write_run(tmp, CGMY_RUN), task="price", seed=7, overrides={"process.Y": "1.2", "tau": "0.5"}
            )
        self.assertIs(config.task, Task.PRICE)
        self.assertEqual(config.seed, 7)
        self.assertEqual(config.params.Y, 1.2)
        self.assertEqual(config.options["tau"], 0.5)

    def test_list_values(self):
        config = load_run_config(task="price", overrides={"process.family": "brownian", "x": "-1,0,2.5"})
        self.assertEqual(config.options["x"], [-1.0, 0.0, 2.5])

    def test_cgmy_exponent_constraint(self):
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaises(serializers.ValidationError) as ctx:
                load_run_config(write_run(tmp, CGMY_RUN.replace("Y=1.5", "Y=2.5")))
        self.assertIn("Y < 2", str(ctx.exception.detail))

    def test_missing_pieces(self):
        with self.assertRaises(serializers.ValidationError):
            load_run_config(task="index")
        with self.assertRaises(serializers.ValidationError):
            load_run_config(task="inequalities", overrides={"process.family": "brownian"})
        with self.assertRaises(serializers.ValidationError):
            load_run_config("/nonexistent/run.env", task="catalog")
        with self.assertRaises(serializers.ValidationError):
            load_run_config(task="bogus")

    def test_bad_grid(self):
        with self.assertRaises(serializers.ValidationError) as ctx:
            load_run_config(task="price", overrides={"process.family": "brownian", "modes": "12"})
        self.assertIn("grid", ctx.exception.detail)

    def test_density_table_must_exist(self):
        with self.assertRaises(serializers.ValidationError):
            load_run_config(task="index", overrides={"process.family": "density", "process.density_table": "/no/table.csv"})


class PlotDataTests(SimpleTestCase):
    def test_cauchy_profile_slopes(self):
        symbol = make_symbol(CauchyParams(c=1.0, gamma=0.0))
        with tempfile.TemporaryDirectory() as tmp:
            path = emit_plot_data(symbol_profile(symbol, GridSpec()), Path(tmp) / "plot.csv")
            rows = read_rows(path)
        log_r = np.array([float(row["log_abs_xi"]) for row in rows])
        for column in ("log_abs_A", "log_re_A"):
            slope = np.polyfit(log_r, np.array([float(row[column]) for row in rows]), 1)[0]
            self.assertAlmostEqual(slope, 1.0, delta=1e-9)

    def test_empty_result_writes_nothing(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "empty.csv"
            with self.assertRaises(EmptyResult):
                emit_plot_data(SpatialSeries(np.array([]), np.array([])), path)
            self.assertFalse(path.exists())

    def test_missing_directory(self):
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaises(OSError):
                emit_plot_data(SpatialSeries(np.array([0.0]), np.array([1.0])), Path(tmp) / "no" / "plot.csv")


class CommandTests(SimpleTestCase):
    def test_index_task(self):
        with tempfile.TemporaryDirectory() as tmp:
            out = Path(tmp) / "out"
            stdout, stderr = levysobolev("index", config=str(write_run(tmp, CGMY_RUN)), out=str(out))
            raw = (out / "index_report.json").read_bytes()
            plot = read_rows(out / "index_plot.csv")
        data = parse_json(raw)
        self.assertAlmostEqual(data["sobolev_index"], 1.5, delta=0.05)
        self.assertEqual(data["defaults"]["grid_r_max"], 1e6)
        self.assertIn("index: sobolev_index=", stderr)
        self.assertIn("index_report.json", stdout)
        self.assertEqual(len(plot), 65)

        expected = sobolev_index(make_symbol(CGMYParams(C=1.0, G=5.0, M=5.0, Y=1.5)), GridSpec(directions=32), 0.05)
        self.assertEqual(report_from_json(raw), expected)

    def test_identical_runs_are_byte_identical(self):
        with tempfile.TemporaryDirectory() as tmp:
            run = str(write_run(tmp, CGMY_RUN))
            outputs = []
            for name in ("first", "second"):
                out = Path(tmp) / name
                levysobolev("index", config=run, out=str(out))
                outputs.append({path.name: path.read_bytes() for path in sorted(out.iterdir())})
        self.assertEqual(outputs[0], outputs[1])

    def test_config_error_exit_code(self):
        with tempfile.TemporaryDirectory() as tmp:
            run = str(write_run(tmp, CGMY_RUN.replace("Y=1.5", "Y=2.5")))
            with self.assertRaises(CommandError) as ctx:
                levysobolev("index", config=run, out=str(Path(tmp) / "out"))
        self.assertEqual(ctx.exception.returncode, 2)
        self.assertIn("Y < 2", str(ctx.exception))

    def test_numerical_error_exit_code(self):
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaises(CommandError) as ctx:
                levysobolev(
                    "density", out=tmp,
                    set=["process.family=stable", "process.alpha=0.3"],
                )
        self.assertEqual(ctx.exception.returncode, 1)
        self.assertIn("density: TailTooFat", str(ctx.exception))

    def test_catalog_task(self):
        with tempfile.TemporaryDirectory() as tmp:
            levysobolev("catalog", out=tmp)
            data = parse_json((Path(tmp) / "catalog.json").read_bytes())
            rows = read_rows(Path(tmp) / "catalog.csv")
        indices = {entry["case"]: entry["analytic_index"] for entry in data["entries"]}
        self.assertEqual(indices["gh"], 1.0)
        self.assertEqual(indices["cgmy_Y1.5"], 1.5)
        self.assertIsNone(indices["cgmy_Y0"])
        self.assertIsNone(indices["stable_1_skewed"])
        self.assertEqual(len(rows), len(data["entries"]))
        self.assertEqual(rows[0]["case"], "brownian")

    def test_cauchy_density(self):
        with tempfile.TemporaryDirectory() as tmp:
            levysobolev(
                "density", out=tmp,
                set=["process.family=cauchy", "modes=16384", "cutoff=32", "x_max=5"],
            )
            rows = read_rows(Path(tmp) / "density_plot.csv")
        values = {float(row["x"]): float(row["value"]) for row in rows}
        self.assertAlmostEqual(values[0.0], 1.0 / math.pi, delta=1e-6)
        self.assertEqual(max(values, key=values.get), 0.0)

    def test_price_task(self):
        with tempfile.TemporaryDirectory() as tmp:
            levysobolev("price", out=tmp, set=["process.family=brownian", "x=-2,0,1.5"])
            rows = read_rows(Path(tmp) / "price.csv")
        for row in rows:
            x = float(row["x"])
            self.assertAlmostEqual(float(row["value"]), math.exp(-x ** 2 / 4.0) / math.sqrt(2.0), delta=1e-8)

    def test_evolve_task(self):
        with tempfile.TemporaryDirectory() as tmp:
            levysobolev(
                "evolve", out=tmp,
                set=["process.family=brownian", "modes=64", "cutoff=8", "K=4", "record_every=2",
                     "scheme=crank_nicolson"],
            )
            rows = read_rows(Path(tmp) / "trajectory.csv")
        self.assertEqual(len(rows), 3 * 64)
        self.assertEqual(sorted({float(row["t"]) for row in rows}), [0.0, 0.5, 1.0])

    def test_inequalities_task(self):
        with tempfile.TemporaryDirectory() as tmp:
            levysobolev(
                "inequalities", out=tmp, seed=3,
                set=["process.family=brownian", "alpha=2", "trials=50", "modes=512"],
            )
            report = form_report_from_json((Path(tmp) / "form_report.json").read_bytes())
        self.assertEqual(report.seed, 3)
        self.assertEqual(report.trials, 50)
        self.assertTrue(report.passed)

    def test_symbol_eval_task(self):
        with tempfile.TemporaryDirectory() as tmp:
            levysobolev("symbol-eval", out=tmp, set=["process.family=cauchy", "xi=-2,0,3"])
            rows = read_rows(Path(tmp) / "symbol.csv")
        self.assertEqual([float(row["real"]) for row in rows], [2.0, 0.0, 3.0])
        self.assertEqual([float(row["imag"]) for row in rows], [0.0, 0.0, 0.0])

    def test_index_task_on_density_table(self):
        x = np.logspace(-4.0, 1.0, 60)
        f = cgmy_density(1.0, 5.0, 5.0, 1.5)(x)
        with tempfile.TemporaryDirectory() as tmp:
            table = Path(tmp) / "cgmy.csv"
            with open(table, "w", encoding="utf-8", newline="") as handle:
                writer = csv.writer(handle)
                writer.writerow(["x", "f"])
                for xi, fi in zip(np.concatenate([-x[::-1], x]), np.concatenate([f[::-1], f])):
                    writer.writerow([repr(float(xi)), repr(float(fi))])
            out = Path(tmp) / "out"
            levysobolev(
                "index",
                out=str(out),
                set=[
                    "process.family=density",
                    f"process.density_table={table}",
                    "process.hint_Y=1.5",
                    "process.hint_C=1",
                ],
            )
            data = parse_json((out / "index_report.json").read_bytes())
        self.assertAlmostEqual(data["sobolev_index"], 1.5, delta=0.05)
        self.assertAlmostEqual(data["beta"], 1.5, delta=0.05)
