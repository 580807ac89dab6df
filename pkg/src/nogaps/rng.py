"""Seed derivation shared by every Monte Carlo driver.

Trial ``i`` of a run with base seed ``s`` always uses ``derive_seed(s, i)``,
so results do not depend on execution order or worker count.
"""

import numpy as np

_MASK64 = (1 << 64) - 1


def derive_seed(base_seed: int, *counters: int) -> int:
    """Injective-in-practice 64-bit seed for the stream ``(base_seed, *counters)``."""
    ss = np.random.SeedSequence(entropy=int(base_seed) & _MASK64, spawn_key=tuple(int(c) for c in counters))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def make_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(int(seed) & _MASK64)
