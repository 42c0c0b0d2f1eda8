"""Monte Carlo crest-factor sampling and comparison against the tail bounds."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import partial
import math
from typing import Sequence

import numpy as np

from . import rng as _rng
from ._parallel import default_workers, map_ordered
from .bounds import BoundValue, OfdmBounds, median_mean_gap_bound, ofdm_bounds, OFDM_TALAGRAND_SIGMA
from .errors import ResourceError
from .ofdm import DEFAULT_OVERSAMPLING, Constellation, crest_factor, psk

__all__ = [
    "SimulationConfig",
    "CfSample",
    "TailRecord",
    "TailReport",
    "GapReport",
    "ScalingRow",
    "ScalingTable",
    "run_cf_simulation",
    "summarize",
    "empirical_tail",
    "compare_bounds",
    "median_mean_gap",
    "scaling_study",
    "DEFAULT_ALPHAS",
]

DEFAULT_ALPHAS = tuple(0.25 * k for k in range(1, 17))
# grid points (trials * n * oversampling) a single run may evaluate
DEFAULT_BUDGET = 2 ** 36
# trials per seeded work unit; fixed so results do not depend on workers
TRIAL_CHUNK = 1024
VIOLATION_SE = 3.0
LITSYN_WUNDER_C = 2.5
QUANTILE_PROBS = (0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99)


@dataclass(frozen=True)
class SimulationConfig:
    n: int
    constellation: Constellation = field(default_factory=lambda: psk(4))
    trials: int = 100_000
    seed: int = 0
    oversampling: int = DEFAULT_OVERSAMPLING
    alphas: tuple = DEFAULT_ALPHAS
    workers: int = field(default_factory=default_workers)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.trials < 100:
            raise ValueError("trials must be >= 100")
        if not 0 <= self.seed <= _rng.MAX_SEED:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.oversampling < 4:
            raise ValueError("oversampling factor must be >= 4")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        a = tuple(float(x) for x in self.alphas)
        if any(x <= 0 for x in a) or any(b <= c for c, b in zip(a, a[1:])):
            raise ValueError("alphas must be positive and strictly increasing")
        object.__setattr__(self, "alphas", a)


@dataclass
class CfSample:
    values: np.ndarray
    mean: float
    median: float
    variance: float
    quantiles: dict

    @property
    def trials(self) -> int:
        return self.values.size


def summarize(values) -> CfSample:
    """Order-independent summary: exact sums, lower median."""
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise ValueError("empty sample")
    mean = math.fsum(v) / v.size
    var = math.fsum((v - mean) ** 2) / (v.size - 1) if v.size > 1 else 0.0
    srt = np.sort(v)
    median = float(srt[(v.size - 1) // 2])
    q = {p: float(np.quantile(srt, p)) for p in QUANTILE_PROBS}
    return CfSample(v, mean, median, var, q)


def _simulate_chunk(lo_hi, n, points, seed, oversampling):
    lo, hi = lo_hi
    M = points.size
    idx = np.stack([_rng.stream(seed, t).integers(0, M, size=n) for t in range(lo, hi)])
    return crest_factor(points[idx], oversampling) if n > 1 else np.abs(points[idx[:, 0]])


def run_cf_simulation(config: SimulationConfig, budget: int = DEFAULT_BUDGET) -> CfSample:
    """Draw ``config.trials`` codewords and return their crest factors.

    Trial ``t`` uses the stream seeded by ``(seed, t)``, so the sample is
    identical for every worker count.
    """
    cost = config.trials * config.n * config.oversampling
    if cost > budget:
        raise ResourceError(f"run needs {cost} grid evaluations, budget is {budget}")
    chunks = [(lo, min(lo + TRIAL_CHUNK, config.trials))
              for lo in range(0, config.trials, TRIAL_CHUNK)]
    fn = partial(_simulate_chunk, n=config.n, points=config.constellation.points,
                 seed=config.seed, oversampling=config.oversampling)
    values = np.concatenate([np.atleast_1d(c) for c in map_ordered(fn, chunks, config.workers)])
    return summarize(values)


def empirical_tail(sample: CfSample, center: float, alpha: float) -> tuple[float, float]:
    """Fraction of draws with |CF - center| >= alpha and its binomial standard error."""
    if not (alpha > 0):
        raise ValueError("alpha must be positive")
    p = np.count_nonzero(np.abs(sample.values - center) >= alpha) / sample.trials
    return float(p), math.sqrt(p * (1.0 - p) / sample.trials)


@dataclass(frozen=True)
class TailRecord:
    alpha: float
    tail_mean: float
    se_mean: float
    tail_median: float
    se_median: float
    bounds: OfdmBounds

    @property
    def violations(self) -> dict:
        """Bounds exceeded by more than three standard errors."""
        def over(p, se, b: BoundValue):
            return p > b.capped + VIOLATION_SE * se

        return {
            "azuma": over(self.tail_mean, self.se_mean, self.bounds.azuma),
            "refined": over(self.tail_mean, self.se_mean, self.bounds.refined),
            "mcdiarmid": over(self.tail_mean, self.se_mean, self.bounds.mcdiarmid),
            "talagrand": over(self.tail_median, self.se_median, self.bounds.talagrand),
        }


@dataclass
class TailReport:
    mean: float
    median: float
    trials: int
    records: list

    @property
    def violation_count(self) -> int:
        return sum(sum(r.violations.values()) for r in self.records)


def compare_bounds(sample: CfSample, alphas: Sequence[float] = DEFAULT_ALPHAS) -> TailReport:
    """Mean-centred tails against Azuma/refined/McDiarmid, median-centred against Talagrand."""
    records = []
    for a in alphas:
        pm, sm = empirical_tail(sample, sample.mean, a)
        pd, sd = empirical_tail(sample, sample.median, a)
        records.append(TailRecord(float(a), pm, sm, pd, sd, ofdm_bounds(a)))
    return TailReport(sample.mean, sample.median, sample.trials, records)


@dataclass(frozen=True)
class GapReport:
    gap: float
    bound: float

    @property
    def satisfied(self) -> bool:
        return self.gap <= self.bound


def median_mean_gap(sample: CfSample) -> GapReport:
    return GapReport(abs(sample.mean - sample.median), median_mean_gap_bound(OFDM_TALAGRAND_SIGMA))


@dataclass(frozen=True)
class ScalingRow:
    n: int
    mean_cf: float
    median_cf: float
    ratio_ln: float
    ratio_log2: float
    lw_center: float
    lw_halfwidth: float

    @property
    def in_lw_band(self) -> bool:
        return abs(self.mean_cf - self.lw_center) < self.lw_halfwidth


@dataclass
class ScalingTable:
    rows: list

    @property
    def mean_nondecreasing(self) -> bool:
        m = [r.mean_cf for r in self.rows]
        return all(b >= a for a, b in zip(m, m[1:]))

    @property
    def mean_increasing(self) -> bool:
        m = [r.mean_cf for r in self.rows]
        return all(b > a for a, b in zip(m, m[1:]))


def _ratio(mean, logn):
    return mean / math.sqrt(logn) if logn > 0 else math.nan


def scaling_study(n_list: Sequence[int], base_config: SimulationConfig,
                  budget: int = DEFAULT_BUDGET) -> ScalingTable:
    """Mean and median CF per n, normalized by sqrt(log n) in both bases.

    The Litsyn-Wunder band |CF - sqrt(ln n)| < c ln ln n / sqrt(ln n) with
    c = 2.5 is reported per row for information only.
    """
    n_list = [int(n) for n in n_list]
    if len(n_list) < 3:
        raise ValueError("scaling study needs at least three values of n")
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be strictly increasing")
    rows = []
    for n in n_list:
        cfg = SimulationConfig(n=n, constellation=base_config.constellation,
                               trials=base_config.trials, seed=base_config.seed,
                               oversampling=base_config.oversampling,
                               alphas=base_config.alphas, workers=base_config.workers)
        s = run_cf_simulation(cfg, budget)
        ln = math.log(n)
        if n >= 3:
            center = math.sqrt(ln)
            half = LITSYN_WUNDER_C * math.log(ln) / center
        else:
            center, half = math.nan, math.nan
        rows.append(ScalingRow(n, s.mean, s.median, _ratio(s.mean, ln),
                               _ratio(s.mean, math.log2(n)), center, half))
    return ScalingTable(rows)
