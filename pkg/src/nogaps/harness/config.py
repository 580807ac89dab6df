"""Experiment configuration files (YAML) and their schema.

A configuration looks like::

    experiment: smin
    ensemble:
      n_rows: 64
      n_cols: 64
      entry_dist: {kind: gaussian}
      norm_bound_M: 2.5
    parameters:
      epsilon: 0.125
      lambda0_over_sqrt_n: [0.5, 0.5]
    trials: 100
    base_seed: 20240611
    output_path: results/smin_gaussian
    summaries:
      - {metric: smin_scaled, thresholds: [0.001, 0.01, 0.1], joint_flag: bounded}

Errors name the offending entry with a dotted path such as
``parameters.epsilon``.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from ..ensembles import EnsembleSpec
from ..errors import ConfigError, ValidationError

EXPERIMENTS = ("deloc_profile", "smin", "distance", "kernel_lcd", "audits", "smallball_suite")

#: Required and optional parameter names per experiment, with optional defaults.
SCHEMA = {
    "deloc_profile": ({"epsilon", "delta"}, {"eps_grid": []}),
    "smin": ({"epsilon"}, {"lambda0": [0.0, 0.0], "lambda0_over_sqrt_n": None}),
    "distance": ({"epsilon"}, {"tau_grid": []}),
    "kernel_lcd": ({"epsilon"}, {"L": None, "c": 0.5, "c0": 0.5, "n_starts": 16}),
    "audits": (set(), {"epsilon": 0.25, "delta": 0.1, "M": 3.0}),
    "smallball_suite": ({"t_grid"}, {"L": None, "C": 1.0, "N_max": 12, "c": 0.05, "c_prime": 0.1}),
}
GRID_KEYS = {"eps_grid", "tau_grid", "t_grid", "lambda0", "lambda0_over_sqrt_n"}
TOP_KEYS = {"experiment", "ensemble", "parameters", "trials", "base_seed", "output_path", "summaries", "workers",
            "max_failure_fraction"}


@dataclass(frozen=True)
class SummaryRequest:
    metric: str
    thresholds: tuple
    joint_flag: str | None = None


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    ensemble: EnsembleSpec
    parameters: dict
    trials: int
    base_seed: int
    output_path: str
    summaries: tuple = ()
    workers: int = 1
    max_failure_fraction: float = 0.1
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {
            "experiment": self.experiment,
            "ensemble": self.ensemble.to_dict(),
            "parameters": _plain(self.parameters),
            "trials": self.trials,
            "base_seed": self.base_seed,
            "output_path": self.output_path,
            "summaries": [
                {"metric": s.metric, "thresholds": list(s.thresholds), "joint_flag": s.joint_flag}
                for s in self.summaries
            ],
            "workers": self.workers,
            "max_failure_fraction": self.max_failure_fraction,
        }
        return d

    def content_hash(self) -> str:
        """SHA-256 of everything that determines record content.

        The output path and worker count are excluded: neither changes the
        records.
        """
        d = self.to_dict()
        for k in ("output_path", "workers"):
            d.pop(k)
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


def _real(path, value, *, positive=False, unit=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, f"expected a real number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(path, "must be finite")
    if positive and not value > 0:
        raise ConfigError(path, "must be positive")
    if unit and not 0 < value <= 1:
        raise ConfigError(path, "must lie in (0, 1]")
    return value


def _grid(path, value):
    if not isinstance(value, (list, tuple)):
        raise ConfigError(path, "expected a list of reals")
    return [_real(f"{path}.{i}", v) for i, v in enumerate(value)]


def _parameters(experiment, raw) -> dict:
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError("parameters", "expected a mapping")
    required, optional = SCHEMA[experiment]
    for key in sorted(required):
        if key not in raw:
            raise ConfigError(f"parameters.{key}", f"required for experiment {experiment!r}")
    unknown = set(raw) - required - set(optional)
    if unknown:
        raise ConfigError(f"parameters.{sorted(unknown)[0]}", f"not a parameter of experiment {experiment!r}")
    out = dict(optional)
    for key, value in raw.items():
        path = f"parameters.{key}"
        if value is None:
            out[key] = None
        elif key in GRID_KEYS:
            out[key] = _grid(path, value)
        elif key in ("n_starts", "N_max"):
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ConfigError(path, "must be a positive integer")
            out[key] = value
        elif key in ("epsilon", "delta"):
            out[key] = _real(path, value, unit=True)
        else:
            out[key] = _real(path, value, positive=True)
    for key in ("lambda0", "lambda0_over_sqrt_n"):
        if out.get(key) is not None and len(out[key]) != 2:
            raise ConfigError(f"parameters.{key}", "expected [real, imaginary]")
    return out


def config_from_dict(raw: dict) -> ExperimentConfig:
    """Validate a parsed configuration mapping."""
    if not isinstance(raw, dict):
        raise ConfigError("", "configuration must be a mapping")
    unknown = set(raw) - TOP_KEYS
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown top-level key")
    for key in ("experiment", "ensemble", "trials", "base_seed", "output_path"):
        if key not in raw:
            raise ConfigError(key, "required")
    experiment = raw["experiment"]
    if experiment not in EXPERIMENTS:
        raise ConfigError("experiment", f"must be one of {EXPERIMENTS}")
    if not isinstance(raw["ensemble"], dict):
        raise ConfigError("ensemble", "expected a mapping")
    try:
        ensemble = EnsembleSpec.from_dict(raw["ensemble"])
    except ValidationError as exc:
        raise ConfigError(f"ensemble.{exc.field}", str(exc)) from None
    except KeyError as exc:
        raise ConfigError(f"ensemble.{exc.args[0]}", "required") from None
    except (TypeError, ValueError) as exc:
        raise ConfigError("ensemble", str(exc)) from None
    trials = raw["trials"]
    if isinstance(trials, bool) or not isinstance(trials, int) or trials < 1:
        raise ConfigError("trials", "must be an integer >= 1")
    seed = raw["base_seed"]
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise ConfigError("base_seed", "must be an integer in [0, 2^64)")
    if not isinstance(raw["output_path"], str) or not raw["output_path"]:
        raise ConfigError("output_path", "must be a non-empty string")
    workers = raw.get("workers", 1)
    if isinstance(workers, bool) or not isinstance(workers, int) or workers < 1:
        raise ConfigError("workers", "must be a positive integer")
    mff = _real("max_failure_fraction", raw.get("max_failure_fraction", 0.1))
    if not 0 <= mff <= 1:
        raise ConfigError("max_failure_fraction", "must lie in [0, 1]")
    summaries = []
    for i, s in enumerate(raw.get("summaries") or []):
        path = f"summaries.{i}"
        if not isinstance(s, dict) or "metric" not in s:
            raise ConfigError(f"{path}.metric", "required")
        summaries.append(SummaryRequest(str(s["metric"]), tuple(_grid(f"{path}.thresholds", s.get("thresholds", []))),
                                        s.get("joint_flag")))
    params = _parameters(experiment, raw.get("parameters"))
    if experiment in ("deloc_profile", "smin", "audits") and ensemble.n_rows != ensemble.n_cols:
        raise ConfigError("ensemble.n_cols", f"experiment {experiment!r} needs a square ensemble")
    return ExperimentConfig(experiment, ensemble, params, trials, seed, raw["output_path"], tuple(summaries),
                            workers, mff)


def load_config(path) -> ExperimentConfig:
    """Read and validate a YAML configuration file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read: {exc.strerror}") from None
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(str(path), f"invalid YAML: {exc}") from None
    return config_from_dict(raw)
