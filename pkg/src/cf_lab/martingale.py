"""Doob martingale of the crest factor under symbol-by-symbol revelation.

``Y_i = E[CF(X) | X_0, ..., X_{i-1}]`` for i = 0..n, so ``Y_0 = E[CF]`` and
``Y_n = CF(X)``.  Exact mode enumerates every completion of a prefix; Monte
Carlo mode samples completions from seeded streams.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import math
import os
from typing import Optional

import numpy as np

from . import rng as _rng
from ._parallel import crest_factors
from .errors import FeasibilityError
from .ofdm import DEFAULT_OVERSAMPLING, Constellation

__all__ = [
    "DoobTrace",
    "BoundedDifferenceReport",
    "ExhaustiveReport",
    "max_enumeration",
    "crest_factor_table",
    "exact_doob_trace",
    "mc_doob_trace",
    "mc_conditional_mean",
    "verify_bounded_differences",
    "exact_conditional_second_moment",
    "verify_exhaustive",
    "psk_variance_identity",
    "pairwise_symbol_second_moment",
]

DEFAULT_MAX_ENUM = 10 ** 7
MC_SLACK_SE = 4.0
MIN_INNER_SAMPLES = 1000
# completions per seeded block in Monte Carlo mode
_MC_BLOCK = 1024

_table_cache: dict = {}


def max_enumeration() -> int:
    """Codeword cap for exact mode; ``CF_LAB_MAX_ENUM`` overrides the default."""
    raw = os.environ.get("CF_LAB_MAX_ENUM")
    return int(float(raw)) if raw else DEFAULT_MAX_ENUM


def _check_feasible(M: int, n: int):
    cap = max_enumeration()
    if M ** n > cap:
        raise FeasibilityError(f"{M}^{n} codewords exceed the enumeration cap {cap}")


@dataclass
class DoobTrace:
    values: np.ndarray
    increments: np.ndarray
    cond_second_moments: np.ndarray
    mode: str
    inner_samples: Optional[int] = None
    std_errors: np.ndarray = field(default=None)
    increment_se: np.ndarray = field(default=None)

    def __post_init__(self):
        n = self.increments.size
        if self.std_errors is None:
            self.std_errors = np.zeros(n + 1)
        if self.increment_se is None:
            self.increment_se = np.zeros(n)

    @property
    def n(self) -> int:
        return self.increments.size


@dataclass(frozen=True)
class BoundedDifferenceReport:
    max_increment: float
    bound: float
    slack: float
    satisfied: bool


def crest_factor_table(constellation: Constellation, n: int,
                       oversampling: int = DEFAULT_OVERSAMPLING, workers: int = 1) -> np.ndarray:
    """CF of every codeword, shaped ``(M,) * n`` and indexed by symbol indices."""
    M = constellation.M
    _check_feasible(M, n)
    key = (constellation.kind, M, n, oversampling)
    if key not in _table_cache:
        idx = np.indices((M,) * n).reshape(n, -1).T
        cf = crest_factors(constellation.points[idx], oversampling, workers)
        table = cf.reshape((M,) * n)
        table.setflags(write=False)
        _table_cache.clear()
        _table_cache[key] = table
    return _table_cache[key]


def _prefix_mean(table: np.ndarray, prefix) -> float:
    return float(np.mean(table[tuple(prefix)]))


def _branch_means(table: np.ndarray, prefix) -> np.ndarray:
    """Y_i for each value of the next symbol after ``prefix``."""
    sub = table[tuple(prefix)]
    return sub.reshape(sub.shape[0], -1).mean(axis=1)


def exact_doob_trace(constellation: Constellation, codeword,
                     oversampling: int = DEFAULT_OVERSAMPLING, workers: int = 1) -> DoobTrace:
    idx = constellation.index_of(codeword)
    n = idx.size
    table = crest_factor_table(constellation, n, oversampling, workers)
    values = np.array([_prefix_mean(table, idx[:i]) for i in range(n + 1)])
    csm = np.empty(n)
    for i in range(1, n + 1):
        branch = _branch_means(table, idx[:i - 1])
        csm[i - 1] = np.mean((branch - values[i - 1]) ** 2)
    return DoobTrace(values, np.diff(values), csm, mode="exact")


def exact_conditional_second_moment(constellation: Constellation, prefix, n: int,
                                    oversampling: int = DEFAULT_OVERSAMPLING) -> float:
    """E[(Y_i - Y_{i-1})^2 | X_0..X_{i-2} = prefix] with i = len(prefix) + 1."""
    idx = constellation.index_of(prefix) if len(prefix) else np.empty(0, dtype=int)
    if idx.size >= n:
        raise ValueError("prefix must be shorter than the codeword")
    table = crest_factor_table(constellation, n, oversampling)
    y_prev = _prefix_mean(table, idx)
    branch = _branch_means(table, idx)
    return float(np.mean((branch - y_prev) ** 2))


def _mc_estimate(constellation, prefix_idx, n, inner_samples, seed, key, oversampling, workers):
    """Mean and standard error of CF over sampled completions of a prefix."""
    free = n - prefix_idx.size
    M = constellation.M
    blocks = []
    for b, lo in enumerate(range(0, inner_samples, _MC_BLOCK)):
        g = _rng.stream(seed, *key, b)
        blocks.append(g.integers(0, M, size=(min(_MC_BLOCK, inner_samples - lo), free)))
    tail = np.concatenate(blocks)
    idx = np.concatenate([np.broadcast_to(prefix_idx, (inner_samples, prefix_idx.size)), tail], axis=1)
    cf = crest_factors(constellation.points[idx], oversampling, workers)
    return math.fsum(cf) / cf.size, float(np.std(cf, ddof=1) / math.sqrt(cf.size))


def mc_conditional_mean(constellation: Constellation, prefix, n: int, inner_samples: int,
                        seed: int, key=(0,), oversampling: int = DEFAULT_OVERSAMPLING,
                        workers: int = 1) -> tuple[float, float]:
    """Sampled E[CF | prefix] and its standard error."""
    idx = constellation.index_of(prefix) if len(prefix) else np.empty(0, dtype=int)
    if inner_samples < 2:
        raise ValueError("need at least two completions for a standard error")
    return _mc_estimate(constellation, idx, n, inner_samples, seed, tuple(key), oversampling, workers)


def mc_doob_trace(constellation: Constellation, codeword, inner_samples: int, seed: int,
                  oversampling: int = DEFAULT_OVERSAMPLING, workers: int = 1) -> DoobTrace:
    """Monte Carlo estimate of the Doob trace with per-entry standard errors.

    Every branch Y_i(prefix, x) is estimated for all M values of x so the
    conditional second moment can be formed around their average.
    """
    if inner_samples < MIN_INNER_SAMPLES:
        raise ValueError(f"inner_samples must be >= {MIN_INNER_SAMPLES}")
    idx = constellation.index_of(codeword)
    n = idx.size
    cf_full = float(crest_factors(constellation.points[idx][None, :], oversampling)[0])
    values = np.empty(n + 1)
    se = np.empty(n + 1)
    csm = np.empty(n)
    values[0], se[0] = _mc_estimate(constellation, idx[:0], n, inner_samples, seed,
                                    (0, constellation.M), oversampling, workers)
    # branch keys (i, x) with x < M; the root estimate uses the spare key (0, M)
    for i in range(1, n + 1):
        branch = np.empty(constellation.M)
        branch_se = np.empty(constellation.M)
        for x in range(constellation.M):
            prefix = np.append(idx[:i - 1], x)
            if i == n:
                branch[x] = float(crest_factors(constellation.points[prefix][None, :], oversampling)[0])
                branch_se[x] = 0.0
            else:
                branch[x], branch_se[x] = _mc_estimate(
                    constellation, prefix, n, inner_samples, seed, (i, x), oversampling, workers)
        csm[i - 1] = np.mean((branch - branch.mean()) ** 2)
        values[i], se[i] = branch[idx[i - 1]], branch_se[idx[i - 1]]
    values[n], se[n] = cf_full, 0.0
    inc_se = np.sqrt(se[1:] ** 2 + se[:-1] ** 2)
    return DoobTrace(values, np.diff(values), csm, mode="mc", inner_samples=inner_samples,
                     std_errors=se, increment_se=inc_se)


def verify_bounded_differences(trace: DoobTrace, n: Optional[int] = None,
                               max_jump: float = 2.0) -> BoundedDifferenceReport:
    """Check |Y_i - Y_{i-1}| <= max_jump / sqrt(n) at every step.

    Exact traces get no slack; Monte Carlo traces get 4 combined standard
    errors per step.
    """
    n = trace.n if n is None else n
    bound = max_jump / math.sqrt(n)
    inc = np.abs(trace.increments)
    slack_per_step = np.zeros_like(inc) if trace.mode == "exact" else MC_SLACK_SE * trace.increment_se
    max_inc = float(inc.max()) if inc.size else 0.0
    ok = bool(np.all(inc <= bound + slack_per_step))
    slack = float(slack_per_step.max()) if inc.size else 0.0
    return BoundedDifferenceReport(max_inc, bound, slack, ok)


@dataclass(frozen=True)
class ExhaustiveReport:
    n: int
    M: int
    codewords: int
    max_tower_residual: float
    max_increment: float
    increment_bound: float
    max_cond_second_moment: float
    second_moment_bound: float
    tower_tol: float

    @property
    def violations(self) -> int:
        return (int(self.max_tower_residual > self.tower_tol)
                + int(self.max_increment > self.increment_bound)
                + int(self.max_cond_second_moment > self.second_moment_bound))

    @property
    def satisfied(self) -> bool:
        return self.violations == 0


def verify_exhaustive(constellation: Constellation, n: int,
                      oversampling: int = DEFAULT_OVERSAMPLING, workers: int = 1,
                      tower_tol: float = 1e-10) -> ExhaustiveReport:
    """Tower property, jump bound and second-moment bound over every prefix.

    Y at each prefix length is averaged straight from the CF table, so the
    tower check compares independently computed levels.
    """
    table = crest_factor_table(constellation, n, oversampling, workers)
    levels = [table.mean(axis=tuple(range(i, n))) if i < n else np.asarray(table)
              for i in range(n + 1)]
    tower = max_inc = max_csm = 0.0
    for i in range(n):
        prev, nxt = levels[i], levels[i + 1]
        tower = max(tower, float(np.max(np.abs(nxt.mean(axis=-1) - prev))))
        diff = nxt - np.asarray(prev)[..., None]
        max_inc = max(max_inc, float(np.max(np.abs(diff))))
        max_csm = max(max_csm, float(np.max(np.mean(diff ** 2, axis=-1))))
    return ExhaustiveReport(
        n=n, M=constellation.M, codewords=table.size,
        max_tower_residual=tower, max_increment=max_inc, increment_bound=2.0 / math.sqrt(n),
        max_cond_second_moment=max_csm, second_moment_bound=2.0 / n, tower_tol=tower_tol,
    )


def psk_variance_identity(M: int) -> float:
    """(4/M) sum_{l=1}^{M-1} sin^2(pi l / M); equals 2 for every M >= 2."""
    if int(M) != M or M < 2:
        raise ValueError(f"M must be an integer >= 2, got {M}")
    s = np.sin(np.pi * np.arange(1, M) / M)
    return 4.0 / M * math.fsum(s * s)


def pairwise_symbol_second_moment(constellation: Constellation, fixed_symbol: complex) -> float:
    """E|x - X'|^2 for X' uniform on the constellation and fixed point x."""
    constellation.index_of([fixed_symbol])
    d = fixed_symbol - constellation.points
    return math.fsum(d.real ** 2 + d.imag ** 2) / constellation.M
