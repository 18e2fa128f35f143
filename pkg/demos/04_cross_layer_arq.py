"""Adaptive modulation designed together with a truncated ARQ link."""

import numpy as np

from crspectral import RayleighChannel
from crspectral.adaptive import LADDERS, solve_vrvp_cutoff, switching_thresholds
from crspectral.crosslayer import (
    ArqConfig,
    avg_transmissions,
    cld_thresholds,
    cross_layer_point,
    default_per_model,
    per_of_mode,
)

pm = default_per_model()
arq = ArqConfig(nt_max=3, p_loss=0.01)
print(f"per-attempt PER target: {arq.p_target:.5f}")

# the PER curves: min(1, a exp(-g gamma)), one per mode
for mode in pm.modes:
    gam = np.array([mode.pivot, 10 ** (mode.threshold_db / 10), 10 ** (mode.threshold_db / 10) * 2])
    print(f"{mode.name:>7}: pivot {10 * np.log10(mode.pivot):6.2f} dB, PER at "
          + ", ".join(f"{p:.4f}" for p in per_of_mode(gam, mode)))

# %% ARQ lets each attempt be sloppier, which lowers the thresholds
print()
vrvp = switching_thresholds(solve_vrvp_cutoff(RayleighChannel.from_db(20)), LADDERS["r5"]).db
for nt in (1, 2, 3, 4):
    print(f"nt_max={nt}: " + "  ".join(f"{v:7.3f}" for v in cld_thresholds(pm, ArqConfig(nt, 0.01)).db))
print("VRVP:     " + "  ".join(f"{v:7.3f}" for v in vrvp))

print("\nmean attempts, p=0.5:", [avg_transmissions(0.5, n) for n in (1, 2, 3, 4, 10)])

# %% one user vs five pooled users
print()
print(f"{'snr_db':>6} {'phys':>7} {'per':>8} {'n_avg':>7} {'L=1':>7} {'L=5':>7} {'ratio':>7}")
for db in range(0, 31, 5):
    ch = RayleighChannel.from_db(db)
    one = cross_layer_point(1, ch, None, pm, arq)
    five = cross_layer_point(5, ch, None, pm, arq)
    print(f"{db:>6} {one.se_physical:7.4f} {one.per:8.5f} {one.n_avg:7.4f} "
          f"{one.sum_se:7.4f} {five.sum_se:7.4f} {five.sum_se / one.sum_se:7.3f}")

# at low SNR the first user is mostly idle, so four extra users multiply
# the throughput; at 30 dB they add half a percent.
