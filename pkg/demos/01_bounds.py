"""
The four crest-factor tail bounds
=================================

Evaluate the Azuma, refined-Azuma, McDiarmid and Talagrand bounds for the
crest factor of an OFDM symbol and compare their exponents.
"""

import numpy as np

from cf_lab import ofdm_bounds, ofdm_exponents

# %%
# Each bound has the form C * exp(-k * alpha**2).  The exponents are fixed
# numbers: McDiarmid is four times Azuma and twice the refined bound.
for name, k in ofdm_exponents().items():
    print(f"{name:>10s}: exp(-alpha^2 * {k})")

# %%
# Raw values exceed one for small deviations; the capped column is what a
# probability can be compared to.
print(f"\n{'alpha':>6s} {'azuma':>10s} {'refined':>10s} {'mcdiarmid':>10s} {'talagrand':>10s}")
for alpha in np.arange(0.0, 4.01, 0.5):
    b = ofdm_bounds(alpha)
    print(f"{alpha:6.2f} " + " ".join(f"{v.capped:10.4g}" for v in b))
