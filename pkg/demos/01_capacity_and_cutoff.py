"""Water-filling over Rayleigh fading: where the cutoff lands and what it buys."""

import numpy as np

from crspectral import RayleighChannel, capacity_optimal, solve_cutoff
from crspectral.fading import LOG2_E, cutoff_residual, linear_to_db
from crspectral.numerics import exp_integral_e1, integrate_semi_infinite

# %% one channel, worked by hand
ch = RayleighChannel.from_db(10)          # average SNR 10 dB -> 10.0 linear
g0 = solve_cutoff(ch)
print(f"avg SNR {ch.avg_snr_db:.1f} dB, cutoff g0 = {g0:.6f} ({linear_to_db(g0):.3f} dB)")
print("power constraint residual:", cutoff_residual(g0, ch.avg_snr))

# capacity is a single E1 evaluation ...
c_closed = capacity_optimal(ch)
# ... or the integral of log2(g/g0) against the exponential density
c_quad = integrate_semi_infinite(lambda g: np.log2(g / g0) * ch.pdf(g), g0)
print(f"capacity closed form {c_closed:.12f}, quadrature {c_quad:.12f}")
print(f"log2(e)*E1(g0/avg)   {LOG2_E * exp_integral_e1(g0 / ch.avg_snr):.12f}")

# %% sweep: the cutoff creeps toward 1 as the channel improves
print()
print(f"{'snr_db':>6} {'g0':>9} {'g0_db':>8} {'C':>8} {'P(g<g0)':>9}")
for db in range(0, 31, 5):
    ch = RayleighChannel.from_db(db)
    g0 = solve_cutoff(ch)
    print(f"{db:>6} {g0:9.5f} {linear_to_db(g0):8.3f} {capacity_optimal(ch):8.4f} "
          f"{ch.prob_below(g0):9.5f}")

# the last column is the fraction of time the transmitter stays silent;
# those silent slots are what a second user can pick up (see 02).
