"""Empirical tail probabilities with Wilson score intervals."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from ..trials import TrialRecord

Z95 = 1.959963984540054


def wilson_interval(successes: int, n: int, z: float = Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion (``(0, 1)`` when ``n = 0``)."""
    if n == 0:
        return 0.0, 1.0
    if not 0 <= successes <= n:
        raise ValueError("need 0 <= successes <= n")
    phat = successes / n
    z2 = z * z
    denom = 1.0 + z2 / n
    centre = (phat + z2 / (2 * n)) / denom
    half = z * math.sqrt(phat * (1 - phat) / n + z2 / (4 * n * n)) / denom
    lo = 0.0 if successes == 0 else max(0.0, centre - half)
    hi = 1.0 if successes == n else min(1.0, centre + half)
    return lo, hi


@dataclass(frozen=True)
class SummaryStats:
    """``P(metric <= threshold [and joint_flag])`` over the non-failed records."""

    metric: str
    threshold_grid: list
    empirical_prob: list
    wilson_lo: list
    wilson_hi: list
    n: int
    n_failed: int = 0
    joint_flag: str | None = None
    counts: list | None = None

    def to_dict(self) -> dict:
        return {
            "metric": self.metric,
            "joint_flag": self.joint_flag,
            "n": self.n,
            "n_failed": self.n_failed,
            "threshold_grid": list(self.threshold_grid),
            "counts": list(self.counts or []),
            "empirical_prob": list(self.empirical_prob),
            "wilson_lo": list(self.wilson_lo),
            "wilson_hi": list(self.wilson_hi),
        }


def summarize(records: Sequence[TrialRecord], metric: str, thresholds: Sequence[float],
              joint_flag: str | None = None) -> SummaryStats:
    """Empirical tail curve of ``metric`` with 95% Wilson intervals.

    Failed trials are excluded and counted in ``n_failed``.  With
    ``joint_flag`` a trial counts only if the flag is also set, which gives
    joint probabilities such as ``P(s_min <= t and ||A|| <= M sqrt(n))``.

    Raises
    ------
    KeyError
        If ``metric`` (or ``joint_flag``) is missing from a non-failed record.
    """
    ok = [r for r in records if not r.failed]
    for r in ok:
        if metric not in r.metrics:
            raise KeyError(f"metric {metric!r} missing from trial {r.trial_index}")
        if joint_flag is not None and joint_flag not in r.flags:
            raise KeyError(f"flag {joint_flag!r} missing from trial {r.trial_index}")
    n = len(ok)
    thresholds = [float(t) for t in thresholds]
    counts, probs, lo, hi = [], [], [], []
    for t in thresholds:
        k = sum(1 for r in ok if r.metrics[metric] <= t and (joint_flag is None or r.flags[joint_flag]))
        a, b = wilson_interval(k, n)
        counts.append(k)
        probs.append(k / n if n else 0.0)
        lo.append(a)
        hi.append(b)
    return SummaryStats(metric, thresholds, probs, lo, hi, n, len(records) - n, joint_flag, counts)
