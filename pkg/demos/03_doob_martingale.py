"""
The Doob martingale of the crest factor
=======================================

Reveal the symbols of a BPSK codeword one at a time and track the
conditional expectation of the crest factor, exactly and by sampling.
"""

import numpy as np

from cf_lab import psk
from cf_lab.martingale import (exact_doob_trace, mc_doob_trace, psk_variance_identity,
                               verify_bounded_differences, verify_exhaustive)

c = psk(2)
n = 8
x = c.points[[0, 1, 1, 0, 1, 0, 0, 0]]

# %%
# Exact trace: every completion of each prefix is enumerated.
exact = exact_doob_trace(c, x)
print("Y_i       :", np.round(exact.values, 4))
print("jump check:", verify_bounded_differences(exact))

# %%
# The Monte Carlo trace carries standard errors; it should sit within a few of
# the exact one.
mc = mc_doob_trace(c, x, inner_samples=5000, seed=1)
print("MC Y_i    :", np.round(mc.values, 4))
print("|diff|/SE :", np.round(np.abs(mc.values - exact.values) / np.maximum(mc.std_errors, 1e-300), 2))

# %%
# Over all 256 codewords: tower property, jumps <= 2/sqrt(n), conditional
# second moments <= 2/n.
print(verify_exhaustive(c, n))

# %%
# The factor behind the 2/n variance bound does not depend on M.
print({M: psk_variance_identity(M) for M in (2, 4, 8, 64)})
