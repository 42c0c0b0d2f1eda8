"""Concentration of the OFDM crest factor: bounds, Doob martingales, Monte Carlo checks."""

__version__ = "0.1.0"

from .bounds import (  # noqa: E402
    BoundValue,
    MartingaleParams,
    OfdmBounds,
    WeightVector,
    azuma_bound,
    hamming_distance,
    kl_divergence,
    mcdiarmid_bound,
    median_mean_gap_bound,
    ofdm_bounds,
    ofdm_exponents,
    refined_azuma_asymptotic,
    refined_azuma_bound,
    talagrand_bound,
    weighted_distance,
)
from .errors import FeasibilityError, ResourceError  # noqa: E402
from .ofdm import (  # noqa: E402
    Constellation,
    SignalParams,
    average_power,
    crest_factor,
    dense_grid_crest_factor,
    evaluate_signal,
    psk,
    qam,
    sample_codeword,
    signal_distance_bound,
)
