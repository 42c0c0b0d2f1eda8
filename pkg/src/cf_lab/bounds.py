"""Closed-form concentration bounds and the distances they are stated in.

Every tail bound returns a :class:`BoundValue` carrying the raw right-hand
side (which can exceed one for small deviations) and its value capped at one.
"""

from __future__ import annotations

from dataclasses import dataclass
import math
from typing import NamedTuple, Sequence

import numpy as np

__all__ = [
    "MartingaleParams",
    "BoundValue",
    "WeightVector",
    "OfdmBounds",
    "kl_divergence",
    "azuma_bound",
    "refined_azuma_bound",
    "refined_azuma_asymptotic",
    "mcdiarmid_bound",
    "talagrand_bound",
    "median_mean_gap_bound",
    "ofdm_bounds",
    "ofdm_exponents",
    "hamming_distance",
    "weighted_distance",
]

WEIGHT_NORM_TOL = 1e-12

# OFDM constants: one revealed symbol moves the crest factor by at most
# 2/sqrt(n); after scaling by sqrt(n) the martingale has jump bound 2 and
# conditional variance bound 2.
OFDM_JUMP = 2.0
OFDM_VARIANCE = 2.0
OFDM_TALAGRAND_SIGMA = 2.0


def _check_nonneg(name, value):
    if not (value >= 0.0) or math.isnan(value):
        raise ValueError(f"{name} must be >= 0, got {value}")


@dataclass(frozen=True)
class MartingaleParams:
    """Jump bound ``d``, conditional-variance bound ``sigma2``, step count ``n``."""

    d: float
    sigma2: float
    n: int

    def __post_init__(self):
        if not (self.d > 0.0) or not math.isfinite(self.d):
            raise ValueError(f"d must be a positive finite real, got {self.d}")
        if not (self.sigma2 >= 0.0) or not math.isfinite(self.sigma2):
            raise ValueError(f"sigma2 must be >= 0, got {self.sigma2}")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n}")

    @property
    def gamma(self) -> float:
        return self.sigma2 / self.d ** 2

    def delta(self, alpha: float) -> float:
        return alpha / self.d


@dataclass(frozen=True)
class BoundValue:
    raw: float
    asymptotic: bool = False

    def __post_init__(self):
        if not (self.raw >= 0.0):
            raise ValueError(f"bound value must be >= 0, got {self.raw}")

    @property
    def capped(self) -> float:
        return min(self.raw, 1.0)


@dataclass(frozen=True)
class WeightVector:
    """Nonnegative weights with unit Euclidean norm."""

    a: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        if a.ndim != 1 or a.size == 0:
            raise ValueError("weights must be a nonempty 1-D vector")
        if np.any(a < 0.0):
            raise ValueError("weights must be nonnegative")
        if abs(math.fsum(a * a) - 1.0) > WEIGHT_NORM_TOL:
            raise ValueError("weights must satisfy sum(a**2) == 1")
        a.setflags(write=False)
        object.__setattr__(self, "a", a)

    @classmethod
    def uniform(cls, n: int) -> "WeightVector":
        return cls(np.full(n, 1.0 / math.sqrt(n)))

    def __len__(self):
        return self.a.size


def kl_divergence(p: float, q: float) -> float:
    """Binary relative entropy D(p||q) in nats.

    Uses 0*log(0/q) = 0 and x*log(x/0) = +inf for x > 0, so the result is
    +inf (not an error) when q is 0 or 1 and p differs from it.
    """
    for name, v in (("p", p), ("q", q)):
        if not (0.0 <= v <= 1.0):
            raise ValueError(f"{name} must lie in [0, 1], got {v}")

    def term(x, y):
        if x == 0.0:
            return 0.0
        if y == 0.0:
            return math.inf
        return x * math.log(x / y)

    return max(term(p, q) + term(1.0 - p, 1.0 - q), 0.0)


def azuma_bound(r: float, d_list: Sequence[float]) -> BoundValue:
    """Azuma-Hoeffding: P(|X_n - X_0| >= r) <= 2 exp(-r^2 / (2 sum d_k^2))."""
    _check_nonneg("r", r)
    d = np.asarray(d_list, dtype=float)
    if d.size == 0 or np.any(~(d > 0.0)):
        raise ValueError("jump bounds d_k must all be positive")
    return BoundValue(2.0 * math.exp(-r * r / (2.0 * math.fsum(d * d))))


def refined_azuma_bound(alpha: float, params: MartingaleParams) -> BoundValue:
    """Divergence-form bound on P(|X_n - X_0| >= alpha * n).

    With gamma = sigma2/d^2 and delta = alpha/d the bound is
    2 exp(-n D((delta+gamma)/(1+gamma) || gamma/(1+gamma))); for delta > 1
    the event is impossible and the bound is 0.
    """
    _check_nonneg("alpha", alpha)
    gamma = params.gamma
    delta = params.delta(alpha)
    if delta > 1.0:
        return BoundValue(0.0)
    p = min((delta + gamma) / (1.0 + gamma), 1.0)
    q = gamma / (1.0 + gamma)
    exponent = params.n * kl_divergence(p, q)
    return BoundValue(2.0 * math.exp(-exponent))


def refined_azuma_asymptotic(alpha: float, params: MartingaleParams) -> BoundValue:
    """Leading term 2 exp(-delta^2 / (2 gamma)) of the bound on P(|X_n - X_0| >= alpha sqrt(n)).

    The multiplicative 1 + O(n^-1/2) correction is not evaluated; the result
    is flagged ``asymptotic``.
    """
    _check_nonneg("alpha", alpha)
    gamma = params.gamma
    if gamma == 0.0:
        raise ZeroDivisionError("singular parameters: gamma = sigma2/d^2 is zero")
    delta = params.delta(alpha)
    return BoundValue(2.0 * math.exp(-delta * delta / (2.0 * gamma)), asymptotic=True)


def mcdiarmid_bound(alpha: float, c_list: Sequence[float]) -> BoundValue:
    """Bounded differences: P(|f - E f| >= alpha) <= 2 exp(-2 alpha^2 / sum c_k^2)."""
    _check_nonneg("alpha", alpha)
    c = np.asarray(c_list, dtype=float)
    if c.size == 0 or np.any(~(c > 0.0)):
        raise ValueError("coordinate bounds c_k must all be positive")
    return BoundValue(2.0 * math.exp(-2.0 * alpha * alpha / math.fsum(c * c)))


def talagrand_bound(alpha: float, sigma: float) -> BoundValue:
    """P(|f - median| >= alpha) <= 4 exp(-alpha^2 / (4 sigma^2))."""
    _check_nonneg("alpha", alpha)
    if not (sigma > 0.0):
        raise ValueError(f"sigma must be positive, got {sigma}")
    return BoundValue(4.0 * math.exp(-alpha * alpha / (4.0 * sigma * sigma)))


def median_mean_gap_bound(sigma: float) -> float:
    """|E f - median| <= 4 sigma sqrt(pi), the integral of the Talagrand tail."""
    if not (sigma > 0.0):
        raise ValueError(f"sigma must be positive, got {sigma}")
    return 4.0 * sigma * math.sqrt(math.pi)


class OfdmBounds(NamedTuple):
    azuma: BoundValue
    refined: BoundValue
    mcdiarmid: BoundValue
    talagrand: BoundValue


def ofdm_bounds(alpha: float) -> OfdmBounds:
    """The four crest-factor tail bounds at deviation ``alpha``.

    Azuma, refined-Azuma (leading order) and McDiarmid bound the deviation
    from the mean, Talagrand the deviation from the median.
    """
    _check_nonneg("alpha", alpha)
    scaled = MartingaleParams(d=OFDM_JUMP, sigma2=OFDM_VARIANCE, n=1)
    return OfdmBounds(
        azuma=azuma_bound(alpha, [OFDM_JUMP]),
        refined=refined_azuma_asymptotic(alpha, scaled),
        mcdiarmid=mcdiarmid_bound(alpha, [OFDM_JUMP]),
        talagrand=talagrand_bound(alpha, OFDM_TALAGRAND_SIGMA),
    )


def ofdm_exponents() -> dict[str, float]:
    """Coefficient k in each bound's exponent exp(-k alpha^2)."""
    gamma = OFDM_VARIANCE / OFDM_JUMP ** 2
    return {
        "azuma": 1.0 / (2.0 * OFDM_JUMP ** 2),
        "refined": 1.0 / (2.0 * gamma * OFDM_JUMP ** 2),
        "mcdiarmid": 2.0 / OFDM_JUMP ** 2,
        "talagrand": 1.0 / (4.0 * OFDM_TALAGRAND_SIGMA ** 2),
    }


def hamming_distance(x, y) -> int:
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.shape} vs {y.shape}")
    return int(np.count_nonzero(x != y))


def weighted_distance(a: WeightVector, x, y) -> float:
    """sum_i a_i [x_i != y_i]; equals hamming/sqrt(n) for uniform weights."""
    if not isinstance(a, WeightVector):
        a = WeightVector(a)
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape != y.shape or x.shape != a.a.shape:
        raise ValueError("weights and vectors must have equal length")
    return math.fsum(a.a[x != y])
