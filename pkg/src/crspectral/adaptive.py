"""Variable-rate variable-power MQAM over a pooled cognitive radio channel.

The BER target enters through ``K = -1.5/ln(5 BER)``, the SNR penalty of the
MQAM bound ``BER <= 0.2 exp(-1.5 gamma / (M - 1))``. The VRVP cutoff is the
water-filling cutoff scaled by ``1/K``; switching thresholds are spaced by
the constellation-size ratios above that cutoff.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .fading import LOG2_E, RayleighChannel, db_to_linear, linear_to_db, solve_cutoff
from .numerics import DEFAULT_TOL, DomainError, Tolerance, exp_integral_e1
from .pooling import sum_spectral_efficiency

__all__ = [
    "DEFAULT_BER",
    "ConstellationLadder",
    "LADDERS",
    "SwitchingThresholds",
    "k_factor",
    "vrvp_power_ratio",
    "vrvp_water_level",
    "solve_vrvp_cutoff",
    "switching_thresholds",
    "region_probabilities",
    "vrvp_spectral_efficiency",
    "vrvp_continuous_se",
    "vrvp_band_factor",
    "amc_cr_sum_se",
    "mqam_ber",
]

DEFAULT_BER = 1e-3

_QAM_NAMES = {2: "BPSK", 4: "QPSK", 8: "8-QAM", 16: "16-QAM", 32: "32-QAM",
              64: "64-QAM", 128: "128-QAM", 256: "256-QAM"}


@dataclass(frozen=True)
class ConstellationLadder:
    """Ordered constellation sizes ``M_1 < ... < M_N``.

    The no-transmission mode ``M_0`` is implicit, so a ladder of ``N``
    constellations partitions the SNR axis into ``N + 1`` fading regions.
    """

    sizes: tuple[int, ...]
    names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        sizes = tuple(int(m) for m in self.sizes)
        if not sizes:
            raise ValueError("ladder needs at least one constellation")
        if any(m < 2 for m in sizes):
            raise ValueError(f"constellation sizes must be >= 2, got {sizes}")
        if any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise ValueError(f"constellation sizes must be strictly increasing, got {sizes}")
        names = tuple(self.names) or tuple(_QAM_NAMES.get(m, f"{m}-QAM") for m in sizes)
        if len(names) != len(sizes):
            raise ValueError("names and sizes differ in length")
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "names", names)

    def __len__(self) -> int:
        return len(self.sizes)

    @property
    def n_regions(self) -> int:
        return len(self.sizes) + 1

    @property
    def bits(self) -> np.ndarray:
        return np.log2(np.asarray(self.sizes, dtype=float))

    def prefix(self, n_regions: int) -> "ConstellationLadder":
        """Truncate to the lowest ``n_regions - 1`` constellations."""
        if not 2 <= n_regions <= self.n_regions:
            raise ValueError(f"cannot take {n_regions} regions from a {self.n_regions}-region ladder")
        k = n_regions - 1
        return ConstellationLadder(self.sizes[:k], self.names[:k])


LADDERS = {
    "r5": ConstellationLadder((2, 4, 16, 64)),
    "r4": ConstellationLadder((2, 4, 16)),
    "r3": ConstellationLadder((2, 4)),
}
LADDERS["default"] = LADDERS["r5"]


@dataclass(frozen=True)
class SwitchingThresholds:
    """Lower region boundaries ``gamma_1 < ... < gamma_N`` (linear SNR).

    Region ``j`` spans ``[gamma_j, gamma_{j+1})`` with ``gamma_{N+1} = inf``;
    everything below ``gamma_1`` is the no-transmission region.
    """

    gammas: tuple[float, ...]

    def __post_init__(self):
        g = tuple(float(x) for x in self.gammas)
        if not g:
            raise ValueError("need at least one threshold")
        if any(not x > 0 for x in g):
            raise ValueError(f"thresholds must be positive, got {g}")
        if any(b <= a for a, b in zip(g, g[1:])):
            raise ValueError(f"thresholds must be strictly increasing, got {g}")
        object.__setattr__(self, "gammas", g)

    @classmethod
    def from_db(cls, values_db: Sequence[float]) -> "SwitchingThresholds":
        return cls(tuple(db_to_linear(v) for v in values_db))

    def __len__(self) -> int:
        return len(self.gammas)

    @property
    def db(self) -> tuple[float, ...]:
        return tuple(linear_to_db(g) for g in self.gammas)

    @property
    def edges(self) -> tuple[float, ...]:
        """Boundaries including the implicit ``inf`` on top."""
        return self.gammas + (math.inf,)


def k_factor(ber: float) -> float:
    """BER-dependent SNR penalty ``-1.5 / ln(5 BER)``, defined for ``0 < BER < 0.2``."""
    ber = float(ber)
    if not 0.0 < ber < 0.2:
        raise DomainError(f"target BER must lie in (0, 0.2), got {ber!r}")
    return -1.5 / math.log(5.0 * ber)


def mqam_ber(gamma, power_ratio, m):
    """MQAM bit error bound ``0.2 exp(-1.5 gamma S/S_avg / (M - 1))``."""
    gamma = np.asarray(gamma, dtype=float)
    return 0.2 * np.exp(-1.5 * gamma * np.asarray(power_ratio) / (np.asarray(m, dtype=float) - 1.0))


def vrvp_power_ratio(gamma, gamma0: float, k: float):
    """VRVP transmit power over average power.

    ``1/gamma0 - 1/(K gamma)`` at or above the cutoff ``gamma0/K``, zero
    below. The expression vanishes at the cutoff, so the policy is
    continuous there.
    """
    g = np.asarray(gamma, dtype=float)
    if np.any(g < 0):
        raise DomainError("instantaneous SNR must be non-negative")
    cutoff = gamma0 / k
    safe = np.where(g > 0, g, 1.0)
    out = np.where(g >= cutoff, 1.0 / gamma0 - 1.0 / (k * safe), 0.0)
    out = np.maximum(out, 0.0)
    return float(out) if out.ndim == 0 else out


def vrvp_water_level(ch: RayleighChannel, ber: float = DEFAULT_BER,
                     tol: Tolerance = DEFAULT_TOL) -> float:
    """``gamma0`` for which the VRVP policy meets the average-power constraint exactly.

    With ``u = K gamma`` the constraint is the water-filling one over an
    average SNR of ``K * avg``, so this is ``solve_cutoff`` on that channel.
    """
    k = k_factor(ber)
    return solve_cutoff(RayleighChannel(k * ch.avg_snr), tol)


def solve_vrvp_cutoff(ch: RayleighChannel, ber: float = DEFAULT_BER,
                      tol: Tolerance = DEFAULT_TOL) -> float:
    """VRVP cutoff ``gamma_K = gamma0 / K`` with ``gamma0`` the water-filling cutoff.

    ``gamma0`` is the capacity cutoff of ``ch`` itself. This is the cutoff
    that reproduces the published VRVP switching thresholds (5.2745 dB for
    BPSK at 20 dB, BER 1e-3). Using :func:`vrvp_water_level` in its place
    gives the cutoff that closes the VRVP power budget exactly; it sits
    about 0.35 dB lower at 20 dB.
    """
    return solve_cutoff(ch, tol) / k_factor(ber)


def switching_thresholds(gamma_k: float, ladder: ConstellationLadder) -> SwitchingThresholds:
    """``gamma_j = gamma_K * M_j / M_1``, so the lowest mode starts at the cutoff."""
    if not gamma_k > 0:
        raise DomainError(f"VRVP cutoff must be positive, got {gamma_k!r}")
    m1 = ladder.sizes[0]
    return SwitchingThresholds(tuple(gamma_k * m / m1 for m in ladder.sizes))


def region_probabilities(ch: RayleighChannel, thresholds: SwitchingThresholds) -> np.ndarray:
    """Probability of each fading region, no-transmission region first.

    Uses survival-function differences so the entries sum to one to
    rounding error.
    """
    surv = [math.exp(-g / ch.avg_snr) for g in thresholds.gammas] + [0.0]
    probs = [1.0 - surv[0]] + [surv[j] - surv[j + 1] for j in range(len(thresholds))]
    return np.asarray(probs)


def vrvp_spectral_efficiency(ch: RayleighChannel, thresholds: SwitchingThresholds,
                             ladder: ConstellationLadder) -> float:
    """Discrete-rate VRVP spectral efficiency, ``sum_j log2(M_j) P(region j)``."""
    if len(thresholds) != len(ladder):
        raise ValueError(
            f"{len(thresholds)} thresholds for a ladder of {len(ladder)} constellations"
        )
    probs = region_probabilities(ch, thresholds)[1:]
    return math.fsum(b * p for b, p in zip(ladder.bits, probs))


def vrvp_continuous_se(ch: RayleighChannel, gamma_k: float) -> float:
    """Continuous-rate reference ``log2(e) E1(gamma_K / avg)`` with ``M(gamma) = gamma/gamma_K``."""
    return LOG2_E * exp_integral_e1(gamma_k / ch.avg_snr)


def vrvp_band_factor(ch: RayleighChannel, gamma_k: float) -> float:
    """Void fraction left by a VRVP user, ``1 - exp(-gamma_K/avg)``."""
    if not gamma_k > 0:
        raise DomainError(f"VRVP cutoff must be positive, got {gamma_k!r}")
    return ch.prob_below(gamma_k)


def amc_cr_sum_se(n_users: int, ch: RayleighChannel, ber: float = DEFAULT_BER,
                  ladder: ConstellationLadder = LADDERS["r5"],
                  tol: Tolerance = DEFAULT_TOL) -> float:
    """Sum spectral efficiency of VRVP MQAM shared by ``n_users`` pooled users."""
    gamma_k = solve_vrvp_cutoff(ch, ber, tol)
    thresholds = switching_thresholds(gamma_k, ladder)
    rate = vrvp_spectral_efficiency(ch, thresholds, ladder)
    delta = vrvp_band_factor(ch, gamma_k)
    return sum_spectral_efficiency(n_users, delta, rate)
