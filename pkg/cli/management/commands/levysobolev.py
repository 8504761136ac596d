"""
Batch front door: ``manage.py levysobolev <task> --config run.env [--out DIR] [--seed N]``.

Exit codes: 0 on success, 1 on numerical failure, 2 on configuration errors.
"""
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError
from rest_framework import serializers

from cli.config import Task, load_run_config, parse_overrides
from cli.runner import StageFailed, run
from symbol_core.utils import InvalidParams

DEFAULT_OUT = "levysobolev_out"


class Command(BaseCommand):
    help = (
        "Run one Levy-symbol task (symbol-eval, index, inequalities, evolve, price, "
        "density, catalog) from a KEY=VALUE run file and write CSV/JSON results."
    )

    def add_arguments(self, parser):
        parser.add_argument("task", choices=[task.value for task in Task])
        parser.add_argument("--config", default=None, help="Run file with KEY=VALUE lines.")
        parser.add_argument(
            "--out",
            default="",
            help=f"Directory for result files (default: {DEFAULT_OUT}/<task>).",
        )
        parser.add_argument("--seed", type=int, default=None, help="Seed for random field ensembles.")
        parser.add_argument(
            "--set",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="Override a run-file key; may be repeated.",
        )

    def handle(self, *args, **options):
        try:
            config = load_run_config(
                options["config"],
                task=options["task"],
                seed=options["seed"],
                overrides=parse_overrides(options["set"]),
            )
        except serializers.ValidationError as exc:
            raise CommandError(f"config: {exc.detail}", returncode=2)
        except InvalidParams as exc:
            raise CommandError(f"config: {exc}", returncode=2)

        out_dir = Path(options["out"]) if options["out"] else Path(DEFAULT_OUT) / config.task.value
        self.stderr.write(f"config: task={config.task.value} seed={config.seed} out={out_dir}")
        try:
            result = run(config, out_dir, report=self.stderr.write)
        except StageFailed as exc:
            raise CommandError(str(exc), returncode=exc.returncode)

        for path in result.files:
            self.stdout.write(str(path))
