"""Checking the closed forms against a seeded Monte Carlo simulator."""

import time
from dataclasses import replace

from crspectral import RayleighChannel, capacity_optimal, pool, solve_cutoff
from crspectral.adaptive import LADDERS, solve_vrvp_cutoff, switching_thresholds, vrvp_spectral_efficiency
from crspectral.oracle import SimConfig, estimate_capacity, estimate_pooled_sum, estimate_vrvp

cfg = SimConfig(n_trials=400_000, seed=42)

print(f"{'snr_db':>6} {'quantity':>10} {'closed':>9} {'mc':>9} {'se':>8} {'z':>6}")
for i, db in enumerate((0, 10, 20, 30)):
    c = replace(cfg, stream=i)
    ch = RayleighChannel.from_db(db)
    g0 = solve_cutoff(ch)
    est = estimate_capacity(ch, g0, c)
    exact = capacity_optimal(ch)
    print(f"{db:>6} {'capacity':>10} {exact:9.5f} {est.mean:9.5f} {est.std_error:8.5f} {est.z_score(exact):6.2f}")
    th = switching_thresholds(solve_vrvp_cutoff(ch), LADDERS["r5"])
    v = estimate_vrvp(ch, th, LADDERS["r5"], c)
    exact = vrvp_spectral_efficiency(ch, th, LADDERS["r5"])
    print(f"{db:>6} {'vrvp':>10} {exact:9.5f} {v.rate.mean:9.5f} {v.rate.std_error:8.5f} {v.rate.z_score(exact):6.2f}")

# %% finite number of sub-bands: the geometric sum assumes infinitely many
ch = RayleighChannel.from_db(0)
res = pool(ch, 5)
print(f"\nL=5 at 0 dB, closed form {res.sum_se:.5f}")
for n in (8, 64, 512):
    e = estimate_pooled_sum(5, ch, res.cutoff, SimConfig(n_subbands=n, n_trials=10_000))
    print(f"  {n:>3} sub-bands: {e.total.mean:.5f} +/- {e.total.std_error:.5f}, "
          f"void fractions " + " ".join(f"{v.mean:.3f}" for v in e.void_fraction))

# %% results do not depend on the worker count
t = time.perf_counter()
a = estimate_capacity(ch, res.cutoff, SimConfig(n_trials=2_000_000, workers=1))
t1 = time.perf_counter() - t
t = time.perf_counter()
b = estimate_capacity(ch, res.cutoff, SimConfig(n_trials=2_000_000, workers=4))
t4 = time.perf_counter() - t
print(f"\n1 worker {t1:.2f}s, 4 workers {t4:.2f}s, identical: {a == b}")
