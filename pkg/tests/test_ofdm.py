import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cf_lab.bounds import WeightVector, weighted_distance
from cf_lab.ofdm import (
    SignalParams,
    average_power,
    crest_factor,
    dense_grid_crest_factor,
    evaluate_signal,
    grid_magnitude,
    psk,
    qam,
    sample_codeword,
    signal_distance_bound,
)


def all_codewords(c, n):
    return c.points[np.array(list(itertools.product(range(c.M), repeat=n)))]


class TestConstellation:
    @pytest.mark.parametrize("M", [2, 3, 4, 8, 16, 64])
    def test_psk_points(self, M):
        c = psk(M)
        expected = [np.exp(1j * (2 * l + 1) * np.pi / M) for l in range(M)]
        np.testing.assert_allclose(c.points, expected, atol=1e-15)
        assert np.all(np.abs(np.abs(c.points) - 1) < 1e-12)

    @pytest.mark.parametrize("M", [4, 16, 64])
    def test_qam_unit_energy(self, M):
        c = qam(M)
        assert abs(np.mean(np.abs(c.points) ** 2) - 1) < 1e-12
        assert len(set(np.round(c.points, 9))) == M

    @pytest.mark.parametrize("bad", [lambda: psk(1), lambda: qam(8), lambda: qam(1), lambda: psk(2.5)])
    def test_invalid(self, bad):
        with pytest.raises(ValueError):
            bad()

    def test_membership(self):
        c = psk(4)
        assert c.contains(c.points[[0, 3, 1]])
        assert not c.contains([1.0 + 0j])
        with pytest.raises(ValueError):
            c.index_of([0.5])

    def test_signal_params(self):
        SignalParams(n=4)
        with pytest.raises(ValueError):
            SignalParams(n=4, oversampling=2)
        with pytest.raises(ValueError):
            SignalParams(n=0)


class TestSampling:
    def test_membership_and_determinism(self):
        c = psk(2)
        a = sample_codeword(c, 4, np.random.default_rng(5))
        b = sample_codeword(c, 4, np.random.default_rng(5))
        np.testing.assert_array_equal(a, b)
        assert c.contains(a)
        assert a.shape == (4,)

    def test_uniform_frequencies(self):
        c = psk(8)
        draws = 100_000
        x = sample_codeword(c, draws, np.random.default_rng(11))
        counts = np.bincount(c.index_of(x), minlength=c.M)
        p = 1 / c.M
        sd = math.sqrt(draws * p * (1 - p))
        assert np.all(np.abs(counts - draws * p) < 3 * sd)

    def test_empty(self):
        with pytest.raises(ValueError):
            sample_codeword(psk(4), 0, np.random.default_rng(0))


class TestSignal:
    def test_single_carrier(self):
        x = psk(4).points[[2]]
        t = np.linspace(0, 1, 11)
        np.testing.assert_allclose(np.abs(evaluate_signal(x, t)), 1.0, atol=1e-15)

    def test_all_equal_at_zero(self):
        c = np.exp(0.3j)
        n = 9
        assert evaluate_signal(np.full(n, c), 0.0) == pytest.approx(math.sqrt(n) * c, abs=1e-14)

    def test_two_carriers_half(self):
        assert evaluate_signal([1, -1], 0.5) == pytest.approx(math.sqrt(2), abs=1e-15)

    @pytest.mark.parametrize("t", [-0.01, 1.01, math.nan])
    def test_domain(self, t):
        with pytest.raises(ValueError):
            evaluate_signal([1, 1], t)

    def test_grid_matches_direct(self):
        x = sample_codeword(psk(4), 12, np.random.default_rng(2))
        L = 8
        t = np.arange(L * 12) / (L * 12)
        np.testing.assert_allclose(grid_magnitude(x, L), np.abs(evaluate_signal(x, t)), atol=1e-13)


class TestCrestFactor:
    @pytest.mark.parametrize("n", [1, 2, 7, 64])
    def test_all_equal(self, n):
        x = np.full(n, psk(4).points[1])
        assert crest_factor(x) == pytest.approx(math.sqrt(n), rel=1e-14)

    def test_two_carriers(self):
        assert crest_factor(np.array([1, -1])) == pytest.approx(math.sqrt(2), rel=1e-14)

    def test_exhaustive_n4_bpsk(self):
        x = all_codewords(psk(2), 4)
        np.testing.assert_allclose(crest_factor(x), dense_grid_crest_factor(x), atol=1e-6)

    def test_batch_equals_single(self):
        x = psk(4).points[np.random.default_rng(3).integers(0, 4, (25, 16))]
        batch = crest_factor(x)
        single = np.array([crest_factor(r) for r in x])
        # SIMD kernels may round differently by array position; only the last bit moves
        np.testing.assert_allclose(batch, single, rtol=1e-14, atol=0)

    def test_not_below_grid_or_origin(self):
        rng = np.random.default_rng(4)
        x = psk(8).points[rng.integers(0, 8, (200, 32))]
        cf = crest_factor(x)
        assert np.all(cf >= grid_magnitude(x, 16).max(axis=1))
        assert np.all(cf >= np.abs(x.sum(axis=1)) / math.sqrt(32))
        assert np.all(cf >= 1.0)

    def test_oversampling_floor(self):
        with pytest.raises(ValueError):
            crest_factor(np.ones(4), oversampling=3)


class TestPowerAndDistance:
    def test_psk_power(self):
        rng = np.random.default_rng(8)
        for n in (4, 64, 256):
            for M in (2, 4, 16):
                x = sample_codeword(psk(M), n, rng)
                assert abs(average_power(x) - 1) < 1e-12

    def test_single_symbol(self):
        assert average_power([np.exp(1j * np.pi / 4)]) == pytest.approx(1.0, abs=1e-15)

    def test_power_matches_time_average(self):
        x = sample_codeword(qam(16), 10, np.random.default_rng(1))
        # |s|^2 is a trig polynomial of degree < 2n, so a 2n-point grid integrates it exactly
        g = grid_magnitude(x, 4)
        assert np.mean(g ** 2) == pytest.approx(average_power(x), rel=1e-12)

    def test_qam_mean_power(self):
        rng = np.random.default_rng(9)
        c = qam(16)
        p = np.array([average_power(sample_codeword(c, 16, rng)) for _ in range(10_000)])
        assert abs(p.mean() - 1) < 3 * p.std(ddof=1) / math.sqrt(p.size)

    def test_distance_examples(self):
        x = sample_codeword(psk(4), 6, np.random.default_rng(0))
        assert signal_distance_bound(x, x) == 0.0
        assert signal_distance_bound([1], [-1]) == 2.0
        with pytest.raises(ValueError):
            signal_distance_bound([1, 1], [1])

    @settings(max_examples=60, deadline=None)
    @given(st.integers(2, 40), st.sampled_from([2, 4, 8]), st.integers(0, 2 ** 32 - 1))
    def test_single_coordinate_change(self, n, M, seed):
        rng = np.random.default_rng(seed)
        c = psk(M)
        ix = rng.integers(0, M, n)
        iy = ix.copy()
        k = rng.integers(n)
        iy[k] = (iy[k] + rng.integers(1, M)) % M
        x, y = c.points[ix], c.points[iy]
        gap = abs(crest_factor(x) - crest_factor(y))
        assert gap <= 2 / math.sqrt(n) + 1e-8
        assert gap <= signal_distance_bound(x, y) + 1e-8

    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 40), st.sampled_from([2, 4, 8]), st.integers(0, 2 ** 32 - 1))
    def test_lipschitz_chain(self, n, M, seed):
        rng = np.random.default_rng(seed)
        c = psk(M)
        ix, iy = rng.integers(0, M, n), rng.integers(0, M, n)
        x, y = c.points[ix], c.points[iy]
        dist = signal_distance_bound(x, y)
        assert abs(crest_factor(x) - crest_factor(y)) <= dist + 1e-8
        assert dist <= 2 * weighted_distance(WeightVector.uniform(n), ix, iy) + 1e-12
        k = int(np.count_nonzero(ix != iy))
        assert dist <= 2 * k / math.sqrt(n) + 1e-12
