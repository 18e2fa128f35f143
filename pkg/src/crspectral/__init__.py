"""Spectral efficiency of a spectrum-pooling cognitive radio over Rayleigh fading.

Closed forms for water-filling capacity, multi-user hole filling, VRVP MQAM
adaptation and truncated-ARQ cross-layer combining, each paired with a
Monte Carlo estimator.
"""

__version__ = "0.1.0"

from .numerics import (
    AccuracyError,
    BracketError,
    ConvergenceError,
    DomainError,
    Interval,
    Tolerance,
    exp_integral_e1,
    find_root,
    integrate,
    integrate_semi_infinite,
)
from .fading import (
    RayleighChannel,
    capacity_optimal,
    db_to_linear,
    linear_to_db,
    rayleigh_pdf,
    solve_cutoff,
    water_filling_ratio,
)
from .pooling import PoolingResult, band_factor_gain, pool, sum_spectral_efficiency, user_capacity
from .adaptive import (
    LADDERS,
    ConstellationLadder,
    SwitchingThresholds,
    amc_cr_sum_se,
    k_factor,
    solve_vrvp_cutoff,
    switching_thresholds,
    vrvp_band_factor,
    vrvp_continuous_se,
    vrvp_power_ratio,
    vrvp_spectral_efficiency,
    vrvp_water_level,
)
from .crosslayer import (
    ArqConfig,
    PerModel,
    avg_per,
    avg_transmissions,
    cld_cr_sum_se,
    cld_thresholds,
    cross_layer_point,
    cross_layer_se,
    default_per_model,
    per_of_mode,
)
from .oracle import (
    SimConfig,
    SimEstimate,
    estimate_capacity,
    estimate_hole_fraction,
    estimate_pooled_sum,
    estimate_vrvp,
    sample_rayleigh_snr,
)
