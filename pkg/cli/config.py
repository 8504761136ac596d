"""
Run files for ``manage.py levysobolev``.

A run file is a flat ``KEY=VALUE`` file (comments start with ``#``)::

    task=index
    seed=0
    process.family=cgmy
    process.C=1
    process.G=5
    process.M=5
    process.Y=1.5
    index_tol=0.05

Keys prefixed with ``process.`` form the family record (see
``symbol_core.serializers``); all other keys are task options. Lists are
comma separated. The environment is never consulted, so a run file fully
determines a run. Values given on the command line replace file values.
"""
import enum
import logging
from dataclasses import dataclass, field
from pathlib import Path

from decouple import RepositoryEnv
from django.conf import settings
from rest_framework import serializers

from index_lab.grids import GridSpec, InvalidGrid
from spectral_solver.evolution import Scheme
from spectral_solver.grids import FrequencyGrid, default_grid
from symbol_core.serializers import FloatListField, params_from_record

logger = logging.getLogger(__name__)

PROCESS_PREFIX = "process."


class Task(str, enum.Enum):
    SYMBOL_EVAL = "symbol-eval"
    INDEX = "index"
    INEQUALITIES = "inequalities"
    EVOLVE = "evolve"
    PRICE = "price"
    DENSITY = "density"
    CATALOG = "catalog"


class Payoff(str, enum.Enum):
    GAUSSIAN = "gaussian"
    HERMITE = "hermite"


def _default(key):
    return lambda: settings.LEVYSOBOLEV_DEFAULTS[key]


@dataclass(frozen=True)
class RunConfig:
    task: Task
    seed: int = 0
    params: object = None
    process: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)

    def index_grid(self) -> GridSpec:
        return GridSpec(
            r_min=self.options["grid_r_min"],
            r_max=self.options["grid_r_max"],
            points_per_decade=self.options["grid_points_per_decade"],
            directions=self.options["grid_directions"],
        )

    def frequency_grid(self, dimension: int) -> FrequencyGrid:
        base = default_grid(dimension)
        modes = self.options.get("modes") or base.modes
        cutoff = self.options.get("cutoff") or base.cutoff
        return FrequencyGrid(dimension=dimension, modes=modes, cutoff=cutoff)


class RunConfigSerializer(serializers.Serializer):
    task = serializers.ChoiceField(choices=[task.value for task in Task])
    seed = serializers.IntegerField(default=0)
    process = serializers.DictField(required=False, default=dict)

    # symbol-eval
    xi = FloatListField(required=False, allow_null=True, default=None)
    # index
    grid_r_min = serializers.FloatField(default=_default("grid_r_min"))
    grid_r_max = serializers.FloatField(default=_default("grid_r_max"))
    grid_points_per_decade = serializers.IntegerField(min_value=2, default=_default("grid_points_per_decade"))
    grid_directions = serializers.IntegerField(min_value=1, default=_default("grid_directions"))
    index_tol = serializers.FloatField(default=_default("index_tol"))
    # inequalities
    alpha = serializers.FloatField(required=False, allow_null=True, default=None)
    trials = serializers.IntegerField(min_value=1, default=_default("form_trials"))
    # solver grid
    modes = serializers.IntegerField(required=False, allow_null=True, default=None)
    cutoff = serializers.FloatField(required=False, allow_null=True, default=None)
    # evolve
    T = serializers.FloatField(default=1.0)
    K = serializers.IntegerField(min_value=1, default=100)
    scheme = serializers.ChoiceField(choices=[scheme.value for scheme in Scheme], default=Scheme.EXACT.value)
    record_every = serializers.IntegerField(min_value=1, required=False, allow_null=True, default=None)
    # price and density
    tau = serializers.FloatField(default=1.0)
    t = serializers.FloatField(default=1.0)
    x = FloatListField(required=False, allow_null=True, default=None)
    x_max = serializers.FloatField(default=10.0)
    payoff = serializers.ChoiceField(choices=[payoff.value for payoff in Payoff], default=Payoff.GAUSSIAN.value)
    payoff_amplitude = serializers.FloatField(default=1.0)
    payoff_mean = serializers.FloatField(default=0.0)
    payoff_scale = serializers.FloatField(default=1.0)
    payoff_order = serializers.IntegerField(min_value=0, default=0)

    def validate_index_tol(self, value):
        if not value > 0.0:
            raise serializers.ValidationError("index_tol must be positive")
        return value

    def validate_alpha(self, value):
        if value is not None and not 0.0 < value <= 2.0:
            raise serializers.ValidationError("alpha must lie in (0, 2]")
        return value

    def validate_T(self, value):
        if not value > 0.0:
            raise serializers.ValidationError("T must be positive")
        return value

    def validate_tau(self, value):
        if value < 0.0:
            raise serializers.ValidationError("tau must be nonnegative")
        return value

    def validate_t(self, value):
        if not value > 0.0:
            raise serializers.ValidationError("t must be positive")
        return value

    def validate_x_max(self, value):
        if not value > 0.0:
            raise serializers.ValidationError("x_max must be positive")
        return value

    def validate(self, attrs):
        task = Task(attrs["task"])
        record = attrs.get("process") or {}
        if task is not Task.CATALOG and not record:
            raise serializers.ValidationError({"process": "a process block (process.family=...) is required"})
        if task is Task.INEQUALITIES and attrs.get("alpha") is None:
            raise serializers.ValidationError({"alpha": "alpha is required for the inequalities task"})
        if record:
            try:
                attrs["_params"] = params_from_record(record)
            except serializers.ValidationError as exc:
                raise serializers.ValidationError({"process": exc.detail})
        try:
            config = self.create(attrs)
            config.index_grid()
            if config.params is not None:
                config.frequency_grid(config.params.dimension)
        except InvalidGrid as exc:
            raise serializers.ValidationError({"grid": str(exc)})
        return attrs

    def create(self, validated_data):
        data = dict(validated_data)
        task = Task(data.pop("task"))
        seed = data.pop("seed")
        process = data.pop("process", {}) or {}
        params = data.pop("_params", None)
        data["scheme"] = Scheme(data["scheme"])
        data["payoff"] = Payoff(data["payoff"])
        return RunConfig(task=task, seed=seed, params=params, process=dict(process), options=data)


def _split(values: dict) -> dict:
    data, process = {}, {}
    for key, value in values.items():
        if value is None or str(value).strip() == "":
            continue
        if key.startswith(PROCESS_PREFIX):
            process[key[len(PROCESS_PREFIX):]] = value
        else:
            data[key] = value
    if process:
        data["process"] = process
    return data


def parse_overrides(pairs) -> dict:
    """``key=value`` strings from the command line."""
    values = {}
    for pair in pairs or ():
        if "=" not in pair:
            raise serializers.ValidationError({"set": f"expected key=value, got {pair!r}"})
        key, value = pair.split("=", 1)
        values[key.strip()] = value.strip()
    return values


def load_run_config(path=None, task=None, seed=None, overrides=None) -> RunConfig:
    """Read, merge and validate a run; raises ``serializers.ValidationError``."""
    values = {}
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise serializers.ValidationError({"config": f"run file {path} does not exist"})
        values.update(RepositoryEnv(str(path)).data)
    values.update(overrides or {})
    if task is not None:
        values["task"] = task
    if seed is not None:
        values["seed"] = seed
    serializer = RunConfigSerializer(data=_split(values))
    serializer.is_valid(raise_exception=True)
    config = serializer.save()
    logger.debug("run config: task=%s process=%s", config.task.value, config.process)
    return config
