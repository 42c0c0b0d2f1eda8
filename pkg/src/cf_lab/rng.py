"""Counter-style seeding: every stream is a pure function of (seed, key...)."""

import numpy as np

__all__ = ["stream", "MAX_SEED"]

MAX_SEED = 2 ** 64 - 1


def stream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for ``key`` under the master ``seed``.

    Streams for distinct keys are statistically independent and do not
    depend on how work is scheduled, so results are identical for any
    number of workers.
    """
    if not 0 <= seed <= MAX_SEED:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    ss = np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))
