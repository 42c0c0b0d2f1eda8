"""
Crest factor of a random QPSK OFDM symbol
=========================================

Sample a codeword, look at the envelope |s(t)| and compute its peak.
"""

import numpy as np

from cf_lab import crest_factor, dense_grid_crest_factor, evaluate_signal, psk, sample_codeword

rng = np.random.default_rng(2011)
x = sample_codeword(psk(4), 64, rng)

# %%
# The envelope on a coarse grid, then the refined peak.  The refinement only
# polishes the grid maximum, so the two agree to well under a percent.
t = np.linspace(0, 1, 257)
env = np.abs(evaluate_signal(x, t))
print("coarse grid max :", env.max())
print("crest factor    :", crest_factor(x))

# %%
# Brute force with 4096 samples per sub-carrier gives the same answer.
print("dense reference :", dense_grid_crest_factor(x))

# %%
# Changing one symbol moves the crest factor by at most 2/sqrt(n).
y = x.copy()
y[10] = -y[10]
print("one-symbol change:", abs(crest_factor(x) - crest_factor(y)), "<=", 2 / np.sqrt(64))
