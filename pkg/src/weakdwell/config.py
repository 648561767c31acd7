"""Flat ``key = value`` run configuration and its validation.

Validation is complete before any computation starts: every required key
is present, typed and in its domain, or a ``ConfigError`` names the key.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .qcore import NAMED_OPERATORS, NAMED_STATES

EXPERIMENTS = ("bath-sim", "pointer-sim", "survival", "dwell", "sweep")
FORMATS = ("csv", "json")
SWEEP_VARIABLES = ("T", "omega", "omega_prime")
# keys that configure the run itself rather than an experiment
RUN_KEYS = ("experiment", "output", "format", "workers")


def parse_config_text(text):
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    params = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in params:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}", key)
        params[key] = value
    return params


def read_config_file(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config_text(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    start: float
    stop: float
    steps: int
    scale: str = "linear"

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ConfigError(f"variable must be one of {SWEEP_VARIABLES}", "variable")
        if self.steps < 2:
            raise ConfigError("steps must be >= 2", "steps")
        if not self.start < self.stop:
            raise ConfigError("start must be below stop", "start")
        if self.scale not in ("linear", "log"):
            raise ConfigError("scale must be 'linear' or 'log'", "scale")
        if self.scale == "log" and not self.start > 0:
            raise ConfigError("log scale requires start > 0", "start")

    def values(self):
        if self.scale == "log":
            points = np.geomspace(self.start, self.stop, self.steps)
        else:
            points = np.linspace(self.start, self.stop, self.steps)
        return [float(v) for v in points]


@dataclass(frozen=True)
class RunConfig:
    experiment: str
    parameters: dict
    output_path: str
    format: str = "csv"
    workers: int = 1
    metadata: bool = True
    raw: dict = field(default_factory=dict)


class _Reader:
    """Typed accessors that name the offending key on failure."""

    def __init__(self, params):
        self.params = params
        self.used = set()

    def _raw(self, key, default):
        self.used.add(key)
        if key not in self.params:
            if default is _REQUIRED:
                raise ConfigError(f"missing required key {key!r}", key)
            return default
        return self.params[key]

    def real(self, key, default=None, check=None, why=""):
        raw = self._raw(key, _REQUIRED if default is None else default)
        try:
            value = float(raw)
        except (TypeError, ValueError):
            raise ConfigError(f"{key} must be a number, got {raw!r}", key) from None
        if not math.isfinite(value):
            raise ConfigError(f"{key} must be finite", key)
        if check is not None and not check(value):
            raise ConfigError(f"{key} = {value:g} is out of range ({why})", key)
        return value

    def integer(self, key, default=None, check=None, why=""):
        raw = self._raw(key, _REQUIRED if default is None else default)
        try:
            value = int(str(raw))
        except ValueError:
            raise ConfigError(f"{key} must be an integer, got {raw!r}", key) from None
        if check is not None and not check(value):
            raise ConfigError(f"{key} = {value} is out of range ({why})", key)
        return value

    def choice(self, key, options, default=None):
        raw = self._raw(key, _REQUIRED if default is None else default)
        if raw not in options:
            raise ConfigError(f"{key} must be one of {tuple(options)}, got {raw!r}", key)
        return raw

    def boolean(self, key, default=False):
        raw = str(self._raw(key, "true" if default else "false")).lower()
        if raw not in ("true", "false", "1", "0", "yes", "no"):
            raise ConfigError(f"{key} must be a boolean, got {raw!r}", key)
        return raw in ("true", "1", "yes")

    def state(self, key):
        raw = self._raw(key, _REQUIRED)
        if raw in NAMED_STATES:
            return raw
        try:
            theta, phi = (float(part) for part in raw.split(","))
        except ValueError:
            raise ConfigError(
                f"{key} must be one of {tuple(NAMED_STATES)} or 'theta,phi' Bloch angles",
                key,
            ) from None
        return (theta, phi)


_REQUIRED = object()


def _validate_bath(r):
    return {
        "n_levels": r.integer("n_levels", check=lambda v: v >= 1, why="n_levels >= 1"),
        "delta_e": r.real("delta_e", check=lambda v: v > 0, why="delta_e > 0"),
        "coupling": r.real("coupling", check=lambda v: v >= 0, why="coupling >= 0"),
        "t_max": r.real("t_max", check=lambda v: v > 0, why="t_max > 0"),
        "dt": r.real("dt", check=lambda v: v > 0, why="dt > 0"),
        "stride": r.integer("stride", default=1, check=lambda v: v >= 1, why="stride >= 1"),
        "force": r.boolean("force", default=False),
    }


def _validate_pointer(r):
    params = {
        "pre": r.state("pre"),
        "post": r.state("post"),
        "operator": r.choice("operator", tuple(NAMED_OPERATORS)),
        "coupling": r.real("coupling"),
        "delta": r.real("delta", check=lambda v: v > 0, why="delta > 0"),
        "n_points": r.integer("n_points", default=2048, check=lambda v: v >= 64, why="n_points >= 64"),
        "output": r.choice("output", ("profile", "summary"), default="profile"),
    }
    span = 12.0 * params["delta"] + abs(params["coupling"])
    params["q_min"] = r.real("q_min", default=-span)
    params["q_max"] = r.real("q_max", default=span)
    if not params["q_max"] > params["q_min"]:
        raise ConfigError("q_max must exceed q_min", "q_max")
    if params["q_min"] > -8 * params["delta"] or params["q_max"] < 8 * params["delta"]:
        raise ConfigError("grid must span [-8 delta, 8 delta]", "q_min")
    return params


def _validate_survival(r):
    params = {
        "kind": r.choice("kind", ("asymptotic", "finite_time"), default="finite_time"),
        "gamma": r.real("gamma", check=lambda v: v > 0, why="gamma > 0"),
        "t_i": r.real("t_i", default=0.0),
        "k": r.integer("k", default=0),
        "delta_e": r.real("delta_e", default=0.0),
        "n_points": r.integer("n_points", default=101, check=lambda v: v >= 2, why="n_points >= 2"),
    }
    params["t_f"] = r.real("t_f", check=lambda v: v > params["t_i"], why="t_f > t_i")
    if params["kind"] == "finite_time" and params["k"] != 0:
        raise ConfigError("finite_time post-selection requires k = 0", "k")
    return params


def _omega_prime_check(omega):
    return lambda v: v <= 2.0 * omega


def _validate_dwell(r):
    omega = r.real("omega", check=lambda v: v > 0, why="omega > 0")
    return {
        "omega": omega,
        "omega_prime": r.real(
            "omega_prime", check=_omega_prime_check(omega), why="omega_prime <= 2*omega"
        ),
        "T": r.real("T", check=lambda v: v > 0, why="T > 0"),
    }


def _validate_sweep(r):
    sweep = SweepSpec(
        variable=r.choice("variable", SWEEP_VARIABLES),
        start=r.real("start"),
        stop=r.real("stop"),
        steps=r.integer("steps"),
        scale=r.choice("scale", ("linear", "log"), default="linear"),
    )
    params = {"sweep": sweep}
    fixed = [name for name in SWEEP_VARIABLES if name != sweep.variable]
    if "omega" in fixed:
        params["omega"] = r.real("omega", check=lambda v: v > 0, why="omega > 0")
    if "omega_prime" in fixed:
        params["omega_prime"] = r.real("omega_prime")
    if "T" in fixed:
        params["T"] = r.real("T", check=lambda v: v > 0, why="T > 0")

    if sweep.variable == "T":
        if not sweep.start > 0:
            raise ConfigError("T sweep must start above 0", "start")
        if params["omega_prime"] > 2 * params["omega"]:
            raise ConfigError("omega_prime must be <= 2*omega", "omega_prime")
    elif sweep.variable == "omega":
        if not sweep.start > 0:
            raise ConfigError("omega sweep must start above 0", "start")
        if params["omega_prime"] > 2 * sweep.start:
            raise ConfigError("omega_prime must be <= 2*omega over the whole sweep", "omega_prime")
    elif sweep.stop > 2 * params["omega"]:
        raise ConfigError("omega_prime sweep must stay <= 2*omega", "stop")
    return params


VALIDATORS = {
    "bath-sim": _validate_bath,
    "pointer-sim": _validate_pointer,
    "survival": _validate_survival,
    "dwell": _validate_dwell,
    "sweep": _validate_sweep,
}


def build_config(experiment, params, output_path=None, fmt=None, workers=None, metadata=True):
    """Validate ``params`` for ``experiment`` and return a ``RunConfig``.

    Command-line values override the run keys found in ``params``.
    """
    declared = params.get("experiment")
    if declared is not None and declared != experiment:
        raise ConfigError(
            f"config declares experiment {declared!r} but {experiment!r} was requested",
            "experiment",
        )
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {experiment!r}", "experiment")
    reader = _Reader(params)
    validated = VALIDATORS[experiment](reader)
    unknown = sorted(set(params) - reader.used - set(RUN_KEYS))
    if unknown:
        raise ConfigError(f"unknown key {unknown[0]!r} for {experiment}", unknown[0])

    fmt = fmt or params.get("format", "csv")
    if fmt not in FORMATS:
        raise ConfigError(f"format must be one of {FORMATS}", "format")
    output_path = output_path or params.get("output")
    if not output_path:
        raise ConfigError("no output path given (use --out or an 'output' key)", "output")
    if workers is None:
        try:
            workers = int(params.get("workers", 1))
        except ValueError:
            raise ConfigError("workers must be an integer", "workers") from None
    if workers < 1:
        raise ConfigError("workers must be >= 1", "workers")
    return RunConfig(experiment, validated, output_path, fmt, workers, metadata, dict(params))
