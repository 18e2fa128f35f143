"""How much a pool of secondary users adds on top of one water-filling user."""

from crspectral import RayleighChannel, pool
from crspectral.pooling import sum_spectral_efficiency, user_capacity

ch = RayleighChannel.from_db(0)
res = pool(ch, 5)
print(f"0 dB: cutoff {res.cutoff:.5f}, band factor {res.band_factor:.5f}")

# user l only sees what users 1..l-1 left empty, so each one gets a
# geometric slice of the first user's rate
for l, c in enumerate(res.user_capacities, start=1):
    print(f"  user {l}: {c:.5f} b/s/Hz (= delta^{l - 1} * C1 = "
          f"{user_capacity(l, res.band_factor, res.primary_capacity):.5f})")
print(f"  sum {res.sum_se:.5f}, gain over one user {res.gain:.5f}")

# %% the pool saturates quickly: the limit is C1 / (1 - delta)
limit = res.primary_capacity / (1 - res.band_factor)
for L in (1, 2, 5, 10, 50):
    print(f"L={L:>2}: {sum_spectral_efficiency(L, res.band_factor, res.primary_capacity):.6f}"
          f"  (limit {limit:.6f})")

# %% gain vs SNR for five users
print()
print(f"{'snr_db':>6} {'C1':>8} {'sum_L5':>8} {'gain':>7} {'delta':>7}")
for db in range(0, 31, 3):
    r = pool(RayleighChannel.from_db(db), 5)
    print(f"{db:>6} {r.primary_capacity:8.4f} {r.sum_se:8.4f} {r.gain:7.4f} {r.band_factor:7.4f}")

# the gain is largest at low SNR, where the first user is silent often.
# At 0 dB it is just under half a bit; by 30 dB the band factor is
# ~0.001 and the pool adds almost nothing.
