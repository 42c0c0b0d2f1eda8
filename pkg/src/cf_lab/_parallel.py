"""Order-preserving process fan-out for crest-factor batches."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from functools import partial
import os

import numpy as np

from .ofdm import crest_factor


def default_workers() -> int:
    return len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else os.cpu_count() or 1


def map_ordered(fn, tasks, workers: int = 1) -> list:
    """``[fn(t) for t in tasks]``, optionally spread over processes."""
    tasks = list(tasks)
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
        return list(pool.map(fn, tasks))


def crest_factors(codewords: np.ndarray, oversampling: int, workers: int = 1,
                  chunk: int = 4096) -> np.ndarray:
    """Batch crest factor with rows split into fixed-size chunks."""
    x = np.atleast_2d(codewords)
    chunks = [x[lo:lo + chunk] for lo in range(0, x.shape[0], chunk)]
    if not chunks:
        return np.empty(0)
    parts = map_ordered(partial(crest_factor, oversampling=oversampling), chunks, workers)
    return np.concatenate([np.atleast_1d(p) for p in parts])
