"""OFDM baseband synthesis and crest-factor computation.

A codeword ``X = (X_0, ..., X_{n-1})`` drives the normalized baseband symbol

    s(t) = n**-0.5 * sum_i X_i exp(2j*pi*i*t),   0 <= t <= 1

(the symbol duration is normalized to one) and its crest factor is the
continuous peak ``max_t |s(t)|``.  Codewords are plain complex numpy arrays;
batches are 2-D arrays with one codeword per row.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np

__all__ = [
    "Constellation",
    "psk",
    "qam",
    "SignalParams",
    "sample_codeword",
    "sample_indices",
    "evaluate_signal",
    "grid_magnitude",
    "crest_factor",
    "dense_grid_crest_factor",
    "average_power",
    "signal_distance_bound",
]

DEFAULT_OVERSAMPLING = 16
# candidates within this fraction of the grid peak get refined
REFINE_WINDOW = 0.005
TIME_TOL = 1e-10
MAX_GOLDEN_ITER = 200
# cap on complex elements held in memory per block
_BLOCK_ELEMS = 1 << 22
# above this length the exp-table evaluation beats a Python-level Horner loop
_HORNER_MAX_N = 256

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class Constellation:
    """Finite symbol alphabet with uniform prior.

    Use :func:`psk` or :func:`qam` rather than building one by hand.
    """

    kind: str
    M: int
    points: np.ndarray = field(repr=False, compare=False)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=complex)
        if pts.shape != (self.M,):
            raise ValueError(f"expected {self.M} points, got shape {pts.shape}")
        if len(np.unique(np.round(pts, 12))) != self.M:
            raise ValueError("constellation points must be distinct")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def name(self) -> str:
        return f"{self.kind}{self.M}"

    @property
    def max_modulus(self) -> float:
        return float(np.max(np.abs(self.points)))

    def index_of(self, symbols) -> np.ndarray:
        """Map symbols to constellation indices; raise if any is not a point."""
        sym = np.asarray(symbols, dtype=complex)
        dist = np.abs(sym[..., None] - self.points)
        idx = np.argmin(dist, axis=-1)
        if np.any(np.take_along_axis(dist, idx[..., None], -1) > 1e-9):
            raise ValueError(f"symbols are not members of {self.name}")
        return idx

    def contains(self, symbols) -> bool:
        try:
            self.index_of(symbols)
        except ValueError:
            return False
        return True


def psk(M: int) -> Constellation:
    """M-PSK with points ``exp(1j*(2l+1)*pi/M)``, l = 0..M-1."""
    if int(M) != M or M < 2:
        raise ValueError(f"M-PSK needs integer M >= 2, got {M}")
    M = int(M)
    pts = np.exp(1j * (2 * np.arange(M) + 1) * np.pi / M)
    return Constellation("psk", M, pts)


def qam(M: int) -> Constellation:
    """Square M-QAM scaled to unit average energy."""
    side = math.isqrt(int(M))
    if int(M) != M or M < 4 or side * side != M:
        raise ValueError(f"square QAM needs a perfect square M >= 4, got {M}")
    levels = 2.0 * np.arange(side) - (side - 1)
    grid = (levels[:, None] + 1j * levels[None, :]).ravel()
    grid = grid / math.sqrt(np.mean(np.abs(grid) ** 2))
    return Constellation("qam", int(M), grid)


@dataclass(frozen=True)
class SignalParams:
    n: int
    oversampling: int = DEFAULT_OVERSAMPLING
    T: float = 1.0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.oversampling < 4:
            raise ValueError("oversampling factor must be >= 4")
        if self.T != 1.0:
            raise ValueError("symbol duration is normalized; T must be 1")


def sample_indices(M: int, n: int, rng: np.random.Generator, size=None) -> np.ndarray:
    if n < 1:
        raise ValueError("codeword length n must be >= 1")
    shape = (n,) if size is None else (size, n)
    return rng.integers(0, M, size=shape)


def sample_codeword(constellation: Constellation, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``n`` i.i.d. uniform symbols from ``constellation``."""
    return constellation.points[sample_indices(constellation.M, n, rng)]


def evaluate_signal(codeword, t):
    """Evaluate s(t) for scalar or array ``t`` in [0, 1]."""
    x = np.asarray(codeword, dtype=complex)
    tt = np.asarray(t, dtype=float)
    if np.any((tt < 0.0) | (tt > 1.0)) or np.any(~np.isfinite(tt)):
        raise ValueError("t must lie in [0, 1]")
    n = x.shape[-1]
    phase = np.exp(2j * np.pi * np.multiply.outer(tt, np.arange(n)))
    out = phase @ x / math.sqrt(n)
    return complex(out) if out.ndim == 0 else out


def grid_magnitude(codewords, oversampling: int = DEFAULT_OVERSAMPLING) -> np.ndarray:
    """|s(k / (L n))| for k = 0..L*n-1 via a zero-padded inverse FFT."""
    x = np.asarray(codewords, dtype=complex)
    n = x.shape[-1]
    N = oversampling * n
    return np.abs(np.fft.ifft(x, N, axis=-1, norm="forward")) / math.sqrt(n)


def _eval_shifted(coef: np.ndarray, u: np.ndarray) -> np.ndarray:
    """|sum_i coef[k, i] exp(2j*pi*i*u[k])|**2 for each row k.

    Rows do not interact; the evaluation route depends only on ``n``.
    """
    n = coef.shape[1]
    if n <= _HORNER_MAX_N:
        w = np.exp(2j * np.pi * u)
        acc = coef[:, -1].copy()
        for i in range(n - 2, -1, -1):
            acc *= w
            acc += coef[:, i]
    else:
        acc = (coef * np.exp(2j * np.pi * np.outer(u, np.arange(n)))).sum(axis=1)
    return acc.real ** 2 + acc.imag ** 2


def _golden_max(coef: np.ndarray, half_width: float) -> np.ndarray:
    """Maximize |poly|^2 over u in [-half_width, half_width], row-wise."""
    K = coef.shape[0]
    a = np.full(K, -half_width)
    b = np.full(K, half_width)
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc = _eval_shifted(coef, c)
    fd = _eval_shifted(coef, d)
    width = 2.0 * half_width
    for _ in range(MAX_GOLDEN_ITER):
        if width <= TIME_TOL:
            break
        left = fc >= fd
        a, b = np.where(left, a, c), np.where(left, d, b)
        c_new = np.where(left, b - _INVPHI * (b - a), d)
        d_new = np.where(left, c, a + _INVPHI * (b - a))
        fp = _eval_shifted(coef, np.where(left, c_new, d_new))
        fc, fd = np.where(left, fp, fd), np.where(left, fc, fp)
        c, d = c_new, d_new
        width *= _INVPHI
    return np.maximum(fc, fd)


def _refine_block(x: np.ndarray, mag2: np.ndarray, oversampling: int) -> np.ndarray:
    """Refined peak of |s|^2 for a block of codewords and their grid values."""
    B, n = x.shape
    N = mag2.shape[1]
    peak = mag2.max(axis=1)
    # discrete local maxima (circular) within the window; the true peak of
    # each lobe lies within one grid step of such a point
    cand = (mag2 >= (1.0 - REFINE_WINDOW) ** 2 * peak[:, None])
    cand &= mag2 >= np.roll(mag2, 1, axis=1)
    cand &= mag2 >= np.roll(mag2, -1, axis=1)
    rows, ks = np.nonzero(cand)
    if rows.size == 0:
        return peak
    t0 = ks / N
    # coefficients of s(t0 + u) as a polynomial in exp(2j*pi*u)
    coef = x[rows] * np.exp(2j * np.pi * np.outer(t0, np.arange(n)))
    refined = np.empty(rows.size)
    step = max(1, _BLOCK_ELEMS // n)
    for lo in range(0, rows.size, step):
        refined[lo:lo + step] = _golden_max(coef[lo:lo + step], 1.0 / N)
    refined /= n
    best = peak.copy()
    np.maximum.at(best, rows, refined)
    return best


def crest_factor(codewords, oversampling: int = DEFAULT_OVERSAMPLING):
    """Continuous peak max_t |s(t)| of one codeword or a batch of rows.

    The envelope is sampled on ``oversampling * n`` uniform points, then every
    grid local maximum within 0.5% of the grid peak is polished by
    golden-section search over the neighbouring grid cells.
    """
    if oversampling < 4:
        raise ValueError("oversampling factor must be >= 4")
    x = np.asarray(codewords, dtype=complex)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    B, n = x.shape
    if n < 1:
        raise ValueError("codeword length must be >= 1")
    if n == 1:
        out = np.abs(x[:, 0])
        return float(out[0]) if single else out
    N = oversampling * n
    out = np.empty(B)
    step = max(1, _BLOCK_ELEMS // N)
    for lo in range(0, B, step):
        blk = x[lo:lo + step]
        mag2 = grid_magnitude(blk, oversampling) ** 2
        out[lo:lo + step] = _refine_block(blk, mag2, oversampling)
    out = np.sqrt(out)
    return float(out[0]) if single else out


def dense_grid_crest_factor(codewords, oversampling: int = 4096):
    """Brute-force reference: grid maximum only, no refinement."""
    x = np.atleast_2d(np.asarray(codewords, dtype=complex))
    single = np.ndim(codewords) == 1
    n = x.shape[1]
    step = max(1, _BLOCK_ELEMS // (oversampling * n))
    out = np.concatenate([
        grid_magnitude(x[lo:lo + step], oversampling).max(axis=1)
        for lo in range(0, x.shape[0], step)
    ])
    return float(out[0]) if single else out


def average_power(codeword) -> float:
    """Time-averaged power, equal to mean |X_i|^2 by sub-carrier orthonormality."""
    x = np.asarray(codeword, dtype=complex)
    if x.size == 0:
        raise ValueError("empty codeword")
    return float(np.mean(x.real ** 2 + x.imag ** 2))


def signal_distance_bound(x, y) -> float:
    """Upper bound n**-0.5 * sum |x_i - y_i| on max_t |s_x(t) - s_y(t)|.

    Also bounds |crest_factor(x) - crest_factor(y)|.
    """
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.shape} vs {y.shape}")
    return float(np.sum(np.abs(x - y)) / math.sqrt(x.shape[-1]))
