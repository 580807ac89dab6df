"""Dispatch of configured experiments to the seeded trial runner."""

from __future__ import annotations

import functools
import math

from ..deloc import audit_trial, deloc_trial, distance_trial, kernel_lcd_trial, set_size, smin_trial
from ..errors import ConfigError
from ..smallball import smallball_trial
from ..structure import L_preset
from ..trials import TrialRecord, run_trials
from .config import ExperimentConfig


def lambda0_of(config: ExperimentConfig) -> complex:
    p = config.parameters
    if p.get("lambda0_over_sqrt_n") is not None:
        re, im = p["lambda0_over_sqrt_n"]
        return complex(re, im) * math.sqrt(config.ensemble.n_rows)
    re, im = p.get("lambda0") or (0.0, 0.0)
    return complex(re, im)


def trial_function(config: ExperimentConfig):
    """The picklable per-trial function ``seed -> (metrics, flags)`` for ``config``."""
    spec, p = config.ensemble, config.parameters
    exp = config.experiment
    if exp == "deloc_profile":
        grid = tuple(sorted(set(p["eps_grid"]) | {p["epsilon"]}))
        return functools.partial(deloc_trial, spec=spec, eps_grid=grid, eps=p["epsilon"], delta=p["delta"])
    if exp == "smin":
        k = set_size(p["epsilon"], spec.n_cols)
        if not 1 <= k < spec.n_cols:
            raise ConfigError("parameters.epsilon", f"ceil(epsilon*n) = {k} must lie in [1, n-1]")
        return functools.partial(smin_trial, spec=spec, eps=p["epsilon"], lam0=lambda0_of(config))
    if exp == "distance":
        return functools.partial(distance_trial, spec=spec, eps=p["epsilon"], z_dist=spec.entry_dist)
    if exp == "kernel_lcd":
        N = spec.n_cols
        if not 1 <= N - set_size(p["epsilon"], N) < N:
            raise ConfigError("parameters.epsilon", "need 1 <= N - ceil(epsilon N) < N")
        L = p["L"] if p["L"] is not None else L_preset("kernel", eps=p["epsilon"], N=N)
        return functools.partial(kernel_lcd_trial, spec=spec, eps=p["epsilon"], L=L, c=p["c"], c0=p["c0"],
                                 n_starts=p["n_starts"])
    if exp == "audits":
        return functools.partial(audit_trial, n=spec.n_rows, eps=p["epsilon"], delta=p["delta"], M=p["M"])
    if exp == "smallball_suite":
        if not hasattr(spec.entry_dist, "atoms"):
            raise ConfigError("ensemble.entry_dist", "smallball_suite needs a discrete entry law")
        L = p["L"] if p["L"] is not None else L_preset("sums", p=spec.p)
        return functools.partial(smallball_trial, atoms=spec.entry_dist, t_grid=tuple(p["t_grid"]), L=L, C=p["C"],
                                 N_max=p["N_max"], c=p["c"], c_prime=p["c_prime"])
    raise ConfigError("experiment", f"unknown experiment {exp!r}")


def fitted_constants(config: ExperimentConfig, records: list[TrialRecord]) -> dict:
    """Constants fitted from a run, persisted in the metadata sidecar."""
    ok = [r for r in records if not r.failed]
    out = {"M": config.ensemble.norm_bound_M}
    if not ok:
        return out
    if config.experiment == "smallball_suite":
        need = max(r.metrics["needed_C"] for r in ok)
        out["C"] = 0.01 * max(1, math.ceil(need / 0.01 - 1e-9))
    elif config.experiment == "kernel_lcd":
        out["c0"] = min(r.metrics["lcd_over_sqrtN"] for r in ok)
    elif config.experiment == "smin":
        vals = sorted(r.metrics["smin_scaled"] for r in ok)
        mid = len(vals) // 2
        out["median_smin_scaled"] = vals[mid] if len(vals) % 2 else 0.5 * (vals[mid - 1] + vals[mid])
    return out


def run_suite(config: ExperimentConfig, *, workers: int | None = None, on_record=None) -> list[TrialRecord]:
    """Run every trial of ``config``; records are identical for any ``workers``."""
    fn = trial_function(config)
    return run_trials(fn, config.trials, config.base_seed, workers=workers or config.workers, on_record=on_record)
