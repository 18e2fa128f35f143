import dataclasses
import math

import numpy as np
import pytest

from conftest import GRID_DB
from crspectral.adaptive import LADDERS, SwitchingThresholds, region_probabilities, solve_vrvp_cutoff, switching_thresholds, vrvp_spectral_efficiency
from crspectral.fading import RayleighChannel, capacity_optimal, solve_cutoff
from crspectral.oracle import (
    SimConfig,
    SimEstimate,
    block_rng,
    estimate_capacity,
    estimate_hole_fraction,
    estimate_pooled_sum,
    estimate_vrvp,
    rayleigh_snr_from_uniform,
    sample_rayleigh_snr,
)
from crspectral.pooling import band_factor_gain, pool
from crspectral.sweep import verdict

TABLE1_VRVP = SwitchingThresholds.from_db((5.2745, 8.2848, 14.3054, 20.326))


def test_sim_config_validation():
    with pytest.raises(ValueError):
        SimConfig(n_trials=0)
    with pytest.raises(ValueError):
        SimConfig(n_subbands=0)
    with pytest.raises(ValueError):
        SimConfig(seed=-1)
    with pytest.raises(ValueError):
        SimConfig(seed=2**64)
    cfg = SimConfig(n_trials=10_000, block_size=4096)
    assert cfg.n_blocks == 3
    assert sum(cfg.block_len(b) for b in range(cfg.n_blocks)) == 10_000


def test_uniform_transform_endpoint():
    assert rayleigh_snr_from_uniform(1.0, 5.0) == 0.0


def test_sample_mean_and_below_cutoff_fraction():
    ch = RayleighChannel(4.0)
    g = sample_rayleigh_snr(ch, block_rng(42, 0), 1_000_000)
    se = g.std(ddof=1) / math.sqrt(g.size)
    assert abs(g.mean() - 4.0) < 3 * se
    g0 = solve_cutoff(ch)
    frac = np.mean(g < g0)
    delta = band_factor_gain(ch, g0)
    assert abs(frac - delta) < 3 * math.sqrt(delta * (1 - delta) / g.size)
    assert np.all(g >= 0)


def test_capacity_estimate_at_20db():
    ch = RayleighChannel(100.0)
    est = estimate_capacity(ch, solve_cutoff(ch), SimConfig(n_trials=1_000_000))
    assert est.n_samples == 1_000_000
    assert abs(est.z_score(capacity_optimal(ch))) < 3


def test_capacity_estimate_never_transmit():
    est = estimate_capacity(RayleighChannel(1.0), 1e6, SimConfig(n_trials=5000))
    assert est.mean == 0.0 and est.std_error == 0.0
    assert est.z_score(0.0) == 0.0


def test_std_error_scaling():
    ch = RayleighChannel(10.0)
    g0 = solve_cutoff(ch)
    se = {n: estimate_capacity(ch, g0, SimConfig(n_trials=n)).std_error for n in (50_000, 100_000, 200_000)}
    assert se[100_000] / se[50_000] == pytest.approx(1 / math.sqrt(2), rel=0.2)
    assert se[200_000] / se[50_000] == pytest.approx(0.5, rel=0.2)


def test_pooled_single_user_reduces_to_capacity():
    ch = RayleighChannel(3.0)
    g0 = solve_cutoff(ch)
    cfg = SimConfig(n_subbands=1, n_trials=20_000)
    pooled = estimate_pooled_sum(1, ch, g0, cfg)
    cap = estimate_capacity(ch, g0, cfg)
    assert pooled.total.mean == pytest.approx(cap.mean, rel=1e-14)
    assert pooled.per_user[0].mean == pytest.approx(cap.mean, rel=1e-14)


def test_pooled_sum_matches_geometric_sum():
    ch = RayleighChannel(1.0)
    res = pool(ch, 5)
    est = estimate_pooled_sum(5, ch, res.cutoff, SimConfig(n_subbands=512, n_trials=10_000))
    assert abs(est.total.z_score(res.sum_se)) < 3
    for l, (u, c) in enumerate(zip(est.per_user, res.user_capacities)):
        assert abs(u.z_score(c)) < 3, l
    # memoryless voids: same fraction at every level
    for v in est.void_fraction:
        assert abs(v.z_score(res.band_factor)) < 3


def test_finite_n_bias_shrinks():
    ch = RayleighChannel(1.0)
    res = pool(ch, 5)
    bias = []
    for n in (8, 64, 512):
        est = estimate_pooled_sum(5, ch, res.cutoff, SimConfig(n_subbands=n, n_trials=10_000))
        bias.append(abs(est.total.mean - res.sum_se))
    assert bias[0] > bias[1] > bias[2]


def test_vrvp_estimate_table1_thresholds():
    ch = RayleighChannel.from_db(20)
    lad = LADDERS["r5"]
    est = estimate_vrvp(ch, TABLE1_VRVP, lad, SimConfig(n_trials=1_000_000))
    assert abs(est.rate.z_score(vrvp_spectral_efficiency(ch, TABLE1_VRVP, lad))) < 3
    assert est.occupancy.sum() == pytest.approx(1.0, abs=1e-15)
    probs = region_probabilities(ch, TABLE1_VRVP)
    se = np.sqrt(probs * (1 - probs) / 1_000_000)
    assert np.all(np.abs(est.occupancy - probs) < 4 * se + 1e-12)


def test_vrvp_estimate_all_mass_below():
    est = estimate_vrvp(RayleighChannel(1e-6), TABLE1_VRVP, LADDERS["r5"], SimConfig(n_trials=5000))
    assert est.rate.mean == 0.0
    assert est.occupancy[0] == 1.0


def test_vrvp_estimate_length_mismatch():
    with pytest.raises(ValueError):
        estimate_vrvp(RayleighChannel(1.0), TABLE1_VRVP, LADDERS["r3"], SimConfig(n_trials=10))


def test_determinism_and_worker_independence():
    ch = RayleighChannel(2.0)
    g0 = solve_cutoff(ch)
    cfg = SimConfig(n_subbands=16, n_trials=30_000, seed=7, block_size=1000)
    a = estimate_pooled_sum(3, ch, g0, cfg)
    b = estimate_pooled_sum(3, ch, g0, cfg)
    c = estimate_pooled_sum(3, ch, g0, dataclasses.replace(cfg, workers=4))
    assert a == b == c
    assert estimate_capacity(ch, g0, cfg) == estimate_capacity(ch, g0, dataclasses.replace(cfg, workers=3))
    assert estimate_capacity(ch, g0, cfg) != estimate_capacity(ch, g0, dataclasses.replace(cfg, seed=8))
    assert estimate_capacity(ch, g0, cfg) != estimate_capacity(ch, g0, dataclasses.replace(cfg, stream=1))


def test_grid_agreement_rule():
    z = []
    for i, d in enumerate(GRID_DB):
        ch = RayleighChannel.from_db(d)
        cfg = SimConfig(n_trials=200_000, stream=i)
        g0 = solve_cutoff(ch)
        z.append(estimate_capacity(ch, g0, cfg).z_score(capacity_optimal(ch)))
        z.append(estimate_hole_fraction(ch, g0, cfg).z_score(band_factor_gain(ch, g0)))
        th = switching_thresholds(solve_vrvp_cutoff(ch), LADDERS["r5"])
        z.append(estimate_vrvp(ch, th, LADDERS["r5"], cfg).rate.z_score(vrvp_spectral_efficiency(ch, th, LADDERS["r5"])))
    assert verdict(z)


def test_verdict_rule():
    assert verdict([0.1, -2.9, 2.5])
    assert verdict([3.2, 0.0, 1.0])
    assert not verdict([3.2, -3.1, 0.0])
    assert not verdict([4.1, 0.0])
    assert not verdict([float("nan")])


def test_z_score_infinite_when_exact_mismatch():
    assert SimEstimate(1.0, 0.0, 10).z_score(0.5) == math.inf
