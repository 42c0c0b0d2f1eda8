"""
How the crest factor grows with n
=================================

The mean crest factor grows roughly like sqrt(log n).
"""

from cf_lab.montecarlo import SimulationConfig, scaling_study
from cf_lab.ofdm import psk

table = scaling_study([16, 64, 256, 1024],
                      SimulationConfig(n=16, constellation=psk(4), trials=2000, seed=3, workers=1))
print(f"{'n':>6s} {'mean':>8s} {'mean/sqrt(ln n)':>16s} {'in LW band':>10s}")
for r in table.rows:
    print(f"{r.n:6d} {r.mean_cf:8.4f} {r.ratio_ln:16.4f} {str(r.in_lw_band):>10s}")
print("nondecreasing:", table.mean_nondecreasing)
