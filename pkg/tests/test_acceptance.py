"""Exit criteria for the package, one test per criterion.

Run with ``pytest tests/test_acceptance.py``; a PASS/FAIL line per criterion
is printed in the terminal summary.
"""

import itertools
import math
import time

import numpy as np
import pytest

from cf_lab.bounds import (MartingaleParams, azuma_bound, kl_divergence, ofdm_bounds,
                           ofdm_exponents, refined_azuma_bound)
from cf_lab.cli import main
from cf_lab.martingale import psk_variance_identity, verify_exhaustive
from cf_lab.montecarlo import (DEFAULT_ALPHAS, SimulationConfig, compare_bounds, median_mean_gap,
                               run_cf_simulation)
from cf_lab.ofdm import crest_factor, dense_grid_crest_factor, psk

SEED = 20111106
_samples = {}


def sample(n, trials):
    key = (n, trials)
    if key not in _samples:
        _samples[key] = run_cf_simulation(
            SimulationConfig(n=n, constellation=psk(4), trials=trials, seed=SEED, workers=1))
    return _samples[key]


def test_01_psk_variance_identity(criterion):
    t0 = time.perf_counter()
    Ms = [2, 3, 4, 8, 16, 64, 256]
    err = max(abs(psk_variance_identity(M) - 2.0) for M in Ms)
    dt = time.perf_counter() - t0
    ok = err <= 1e-12 and dt < 1.0
    criterion(1, "PSK variance identity = 2", ok, f"max|err|={err:.2e} runtime={dt:.3f}s")
    assert ok


def test_02_exhaustive_martingale(criterion):
    t0 = time.perf_counter()
    reports = [verify_exhaustive(psk(2), 8), verify_exhaustive(psk(4), 5)]
    dt = time.perf_counter() - t0
    ok = dt < 120
    details = []
    for r in reports:
        ok &= r.max_tower_residual <= 1e-10
        ok &= r.max_increment <= 2 / math.sqrt(r.n)
        ok &= r.max_cond_second_moment <= 2 / r.n
        ok &= r.violations == 0
        details.append(f"M={r.M},n={r.n}: tower={r.max_tower_residual:.1e} "
                       f"jump={r.max_increment:.4f}/{r.increment_bound:.4f} "
                       f"var={r.max_cond_second_moment:.4f}/{r.second_moment_bound:.4f}")
    criterion(2, "exhaustive Doob martingale checks", ok, "; ".join(details) + f" runtime={dt:.1f}s")
    assert ok


def test_03_bound_validity(criterion):
    t0 = time.perf_counter()
    alphas = DEFAULT_ALPHAS
    assert alphas[0] == 0.25 and alphas[-1] == 4.0 and len(alphas) == 16
    counts = {}
    ok = True
    for n in (64, 256):
        s = sample(n, 100_000)
        rep = compare_bounds(s, alphas)
        counts[n] = rep.violation_count
        ok &= rep.violation_count == 0
        if n == 256:
            ln = math.sqrt(math.log(256))
            ok &= ln - 1 <= s.mean <= ln + 1
    dt = time.perf_counter() - t0
    ok &= dt < 600
    criterion(3, "bounds hold at desk scale (3 SE slack)", ok, f"violations={counts} runtime={dt:.1f}s")
    assert ok


def test_04_exponent_ordering(criterion):
    t0 = time.perf_counter()
    ok = True
    for a in (0.0,) + DEFAULT_ALPHAS:
        b = ofdm_bounds(a)
        ok &= b.mcdiarmid.raw <= b.refined.raw <= b.azuma.raw
    e = ofdm_exponents()
    r4 = e["mcdiarmid"] / e["azuma"]
    r2 = e["mcdiarmid"] / e["refined"]
    ok &= r4 == 4.0 and r2 == 2.0
    dt = time.perf_counter() - t0
    ok &= dt < 1.0
    criterion(4, "mcdiarmid <= refined <= azuma, exponent ratios", ok, f"ratios={r4}, {r2} runtime={dt:.3f}s")
    assert ok


def test_05_median_mean_gap(criterion):
    t0 = time.perf_counter()
    gaps = {}
    ok = True
    for n in (64, 256, 1024):
        g = median_mean_gap(sample(n, 10_000))
        gaps[n] = g.gap
        ok &= g.satisfied and g.bound == pytest.approx(14.179631, abs=1e-6)
    dt = time.perf_counter() - t0
    ok &= dt < 900
    small = all(v < 0.2 for v in gaps.values())
    criterion(5, "median-mean gap <= 8 sqrt(pi)", ok,
              f"gaps={ {k: round(v, 4) for k, v in gaps.items()} } (all < 0.2: {small}) runtime={dt:.1f}s")
    assert ok


def test_06_crest_factor_oracle(criterion):
    t0 = time.perf_counter()
    rng = np.random.default_rng(SEED)
    c = psk(4)
    worst = 0.0
    for n in (8, 64):
        x = c.points[rng.integers(0, 4, (1000, n))]
        worst = max(worst, float(np.max(np.abs(crest_factor(x, 16) - dense_grid_crest_factor(x, 4096)))))
    b = psk(2)
    for n in range(1, 11):
        x = b.points[np.array(list(itertools.product(range(2), repeat=n)))]
        worst = max(worst, float(np.max(np.abs(crest_factor(x, 16) - dense_grid_crest_factor(x, 4096)))))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-6 and dt < 300
    criterion(6, "L=16+refinement matches L=4096 grid", ok, f"max|diff|={worst:.2e} runtime={dt:.1f}s")
    assert ok


def test_07_scaling(criterion):
    t0 = time.perf_counter()
    ns = (64, 256, 1024, 4096)
    means = [sample(n, 10_000).mean for n in ns]
    ratios = [m / math.sqrt(math.log(n)) for m, n in zip(means, ns)]
    increasing = all(b > a for a, b in zip(means, means[1:]))
    spread = (max(ratios) - min(ratios)) / min(ratios)
    dt = time.perf_counter() - t0
    ok = increasing and spread < 0.25 and dt < 1800
    criterion(7, "mean CF increasing, ratio to sqrt(ln n) stable", ok,
              f"means={[round(m, 4) for m in means]} ratio spread={spread:.3f} runtime={dt:.1f}s")
    assert ok


def test_08_kl_pinsker(criterion):
    t0 = time.perf_counter()
    grid = [k / 100 for k in range(101)]
    ok = True
    for p in grid:
        for q in grid:
            d = kl_divergence(p, q)
            ok &= d >= 0 and ((d == 0) == (p == q)) and d >= 2 * (p - q) ** 2
    for n in (1, 10, 100):
        params = MartingaleParams(d=1.0, sigma2=1.0, n=n)
        for k in range(1, 20):
            delta = k / 20
            ok &= refined_azuma_bound(delta, params).raw <= azuma_bound(delta * n, [1.0] * n).raw
    dt = time.perf_counter() - t0
    ok &= dt < 5
    criterion(8, "KL >= 0, Pinsker, refined <= azuma at gamma=1", ok, f"runtime={dt:.2f}s")
    assert ok


def test_09_determinism(criterion, tmp_path):
    t0 = time.perf_counter()
    blobs = []
    for w in (1, 2, 4):
        out = tmp_path / f"w{w}"
        rc = main(["simulate", "--n", "64", "--trials", "10000", "--seed", "7",
                   "--workers", str(w), "--out", str(out), "--format", "csv"])
        assert rc == 0
        blobs.append((out / "tails.csv").read_bytes())
    dt = time.perf_counter() - t0
    ok = blobs[0] == blobs[1] == blobs[2] and dt < 300
    criterion(9, "byte-identical CSV for workers 1/2/4", ok, f"runtime={dt:.1f}s")
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
