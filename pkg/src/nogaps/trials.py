"""Trial records and the seeded trial runner shared by all experiment drivers."""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .errors import NoGapsError, NumericError
from .rng import derive_seed

log = logging.getLogger(__name__)

TrialFn = Callable[[int], tuple[dict, dict]]


@dataclass(frozen=True)
class TrialRecord:
    """Outcome of one seeded trial.

    ``metrics`` maps names to finite reals and ``flags`` names to booleans.
    A trial whose numerical routine failed has ``flags["failed"] = True``
    and no metrics.
    """

    trial_index: int
    seed: int
    metrics: dict = field(default_factory=dict)
    flags: dict = field(default_factory=dict)
    wall_time_ms: int = 0

    def __post_init__(self):
        for k, v in self.metrics.items():
            if not math.isfinite(v):
                raise ValueError(f"metric {k!r} is not finite: {v!r}")

    @property
    def failed(self) -> bool:
        return bool(self.flags.get("failed", False))

    def to_dict(self) -> dict:
        return {
            "trial_index": int(self.trial_index),
            "seed": int(self.seed),
            "metrics": {k: float(self.metrics[k]) for k in sorted(self.metrics)},
            "flags": {k: bool(self.flags[k]) for k in sorted(self.flags)},
            "wall_time_ms": int(self.wall_time_ms),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TrialRecord":
        return cls(int(d["trial_index"]), int(d["seed"]), dict(d.get("metrics", {})),
                   dict(d.get("flags", {})), int(d.get("wall_time_ms", 0)))


def execute_trial(fn: TrialFn, index: int, seed: int) -> TrialRecord:
    """Run ``fn(seed)`` and wrap the result; numerical failures become flagged records."""
    start = time.perf_counter()
    try:
        metrics, flags = fn(seed)
        metrics = {k: float(v) for k, v in metrics.items()}
        flags = {k: bool(v) for k, v in flags.items()}
        flags.setdefault("failed", False)
    except (NumericError, ArithmeticError) as exc:
        log.warning("trial %d failed: %s", index, exc)
        metrics, flags = {}, {"failed": True}
    except NoGapsError:
        raise
    elapsed = int(round((time.perf_counter() - start) * 1000))
    return TrialRecord(index, seed, metrics, flags, elapsed)


def _execute_packed(args):
    return execute_trial(*args)


def run_trials(fn: TrialFn, trials: int, base_seed: int, *, workers: int = 1,
               on_record: Callable[[TrialRecord], None] | None = None) -> list[TrialRecord]:
    """Run ``trials`` independent trials of ``fn``.

    Trial ``i`` receives ``derive_seed(base_seed, i)``.  Records are returned,
    and passed to ``on_record``, in trial order whatever the number of worker
    processes; ``fn`` must be picklable when ``workers > 1``.
    """
    if trials < 0:
        raise ValueError("trials must be non-negative")
    jobs: Iterable = ((fn, i, derive_seed(base_seed, i)) for i in range(trials))
    records = []
    if workers <= 1 or trials <= 1:
        results = map(_execute_packed, jobs)
        for rec in results:
            records.append(rec)
            if on_record is not None:
                on_record(rec)
        return records
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for rec in pool.map(_execute_packed, jobs, chunksize=1):
            records.append(rec)
            if on_record is not None:
                on_record(rec)
    return records
