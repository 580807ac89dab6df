"""Persisted calibration baseline for the smallest-singular-value experiment.

The committed file ``nogaps/data/smin_baseline.json`` records the empirical
median of ``s_min((A - lam0)_{I^c}) / sqrt(n)`` for each case below, produced
by :func:`calibrate_smin_baseline` with ``CALIBRATION_SEED``.  Later runs
with other seeds are compared against it.
"""

from __future__ import annotations

import json
import math
from importlib import resources
from pathlib import Path

import numpy as np

from ..deloc import smin_experiment
from ..ensembles import EnsembleSpec, Gaussian, SymmetricSign

CALIBRATION_SEED = 915_311
BASELINE_N = 64
BASELINE_EPS = 0.125
BASELINE_TRIALS = 100

ENSEMBLES = {"gaussian": Gaussian(), "symmetric_sign": SymmetricSign()}
#: ``lam0 / sqrt(n)`` per shift label.
SHIFTS = {"zero": 0j, "half_diag": 0.5 + 0.5j}


def case_key(ensemble: str, shift: str) -> str:
    return f"{ensemble}/{shift}"


def baseline_spec(ensemble: str, n: int = BASELINE_N) -> EnsembleSpec:
    return EnsembleSpec(n, n, ENSEMBLES[ensemble])


def calibrate_smin_baseline(seed: int = CALIBRATION_SEED, trials: int = BASELINE_TRIALS, n: int = BASELINE_N,
                            eps: float = BASELINE_EPS) -> dict:
    cases = {}
    for ens in ENSEMBLES:
        for shift, z in SHIFTS.items():
            recs = smin_experiment(baseline_spec(ens, n), eps, z * math.sqrt(n), trials, seed)
            vals = [r.metrics["smin_scaled"] for r in recs if not r.failed]
            cases[case_key(ens, shift)] = float(np.median(vals))
    return {"n": n, "epsilon": eps, "trials": trials, "seed": seed, "median_smin_scaled": cases}


def write_baseline(data: dict, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def load_smin_baseline() -> dict:
    text = resources.files("nogaps").joinpath("data/smin_baseline.json").read_text(encoding="utf-8")
    return json.loads(text)
