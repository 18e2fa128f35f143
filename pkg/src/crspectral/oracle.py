"""Monte Carlo estimates of the closed-form quantities.

Trials are grouped into fixed-size blocks. Block ``b`` draws from a Philox
stream keyed by ``SeedSequence([seed, stream, b])``, so every trial's
randomness is a pure function of ``(seed, stream, trial index)`` and the
result does not depend on how many workers run the blocks. ``stream``
separates independent experiments that share a seed, e.g. the points of an
SNR grid. Per-block moments are merged in block order, which keeps the
reduction bit-reproducible.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .adaptive import ConstellationLadder, SwitchingThresholds
from .fading import RayleighChannel

__all__ = [
    "SimConfig",
    "SimEstimate",
    "block_rng",
    "rayleigh_snr_from_uniform",
    "sample_rayleigh_snr",
    "estimate_capacity",
    "estimate_hole_fraction",
    "PooledEstimate",
    "estimate_pooled_sum",
    "VrvpEstimate",
    "estimate_vrvp",
]


@dataclass(frozen=True)
class SimConfig:
    n_subbands: int = 64
    n_trials: int = 100_000
    seed: int = 42
    block_size: int = 4096
    workers: int = 1
    stream: int = 0

    def __post_init__(self):
        for name in ("n_subbands", "n_trials", "block_size", "workers"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if not 0 <= self.stream < 2**64:
            raise ValueError(f"stream must be a 64-bit unsigned integer, got {self.stream!r}")

    @property
    def n_blocks(self) -> int:
        return -(-self.n_trials // self.block_size)

    def block_len(self, b: int) -> int:
        return min(self.block_size, self.n_trials - b * self.block_size)


@dataclass(frozen=True)
class SimEstimate:
    mean: float
    std_error: float
    n_samples: int

    def z_score(self, target: float) -> float:
        if self.std_error == 0.0:
            return 0.0 if self.mean == target else math.copysign(math.inf, self.mean - target)
        return (self.mean - target) / self.std_error


class _Moments:
    """Running (n, mean, M2), merged with Chan's pairwise update."""

    __slots__ = ("n", "mean", "m2")

    def __init__(self, n=0, mean=0.0, m2=0.0):
        self.n, self.mean, self.m2 = n, mean, m2

    @classmethod
    def of(cls, x: np.ndarray) -> "_Moments":
        n = x.size
        if n == 0:
            return cls()
        mean = float(np.sum(x)) / n
        return cls(n, mean, float(np.sum((x - mean) ** 2)))

    def merge(self, other: "_Moments") -> None:
        if other.n == 0:
            return
        n = self.n + other.n
        d = other.mean - self.mean
        self.mean += d * other.n / n
        self.m2 += other.m2 + d * d * self.n * other.n / n
        self.n = n

    def estimate(self) -> SimEstimate:
        if self.n < 2:
            return SimEstimate(self.mean, 0.0, self.n)
        var = self.m2 / (self.n - 1)
        return SimEstimate(self.mean, math.sqrt(var / self.n), self.n)


def block_rng(seed: int, block: int, stream: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, stream, block])))


def rayleigh_snr_from_uniform(u, avg_snr: float):
    """Inverse-CDF transform ``-avg * ln(u)`` for ``u`` in (0, 1]."""
    return -avg_snr * np.log(u)


def sample_rayleigh_snr(ch: RayleighChannel, rng: np.random.Generator, size=None):
    """Exponentially distributed instantaneous SNR with mean ``ch.avg_snr``."""
    u = 1.0 - rng.random(size)  # (0, 1]
    return rayleigh_snr_from_uniform(u, ch.avg_snr)


def _run(cfg: SimConfig, kernel: Callable[[np.random.Generator, int], tuple]) -> list:
    """Evaluate ``kernel`` on every block, returning results in block order."""
    def one(b: int):
        return kernel(block_rng(cfg.seed, b, cfg.stream), cfg.block_len(b))

    blocks = range(cfg.n_blocks)
    if cfg.workers == 1:
        return [one(b) for b in blocks]
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        return list(pool.map(one, blocks))


def _reduce(parts) -> SimEstimate:
    acc = _Moments()
    for p in parts:
        acc.merge(p)
    return acc.estimate()


def _capacity_rate(gamma: np.ndarray, gamma0: float) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.where(gamma >= gamma0, np.log2(np.maximum(gamma, gamma0) / gamma0), 0.0)


def estimate_capacity(ch: RayleighChannel, gamma0: float, cfg: SimConfig) -> SimEstimate:
    """Mean of ``log2(gamma/gamma0)`` over ``gamma >= gamma0``, one draw per trial."""
    def kernel(rng, n):
        return _Moments.of(_capacity_rate(sample_rayleigh_snr(ch, rng, n), gamma0))
    return _reduce(_run(cfg, kernel))


def estimate_hole_fraction(ch: RayleighChannel, gamma0: float, cfg: SimConfig) -> SimEstimate:
    """Empirical probability that a sub-band falls below the cutoff."""
    def kernel(rng, n):
        return _Moments.of((sample_rayleigh_snr(ch, rng, n) < gamma0).astype(float))
    return _reduce(_run(cfg, kernel))


@dataclass(frozen=True)
class PooledEstimate:
    per_user: tuple[SimEstimate, ...]
    total: SimEstimate
    void_fraction: tuple[SimEstimate, ...]


def estimate_pooled_sum(n_users: int, ch: RayleighChannel, gamma0: float,
                        cfg: SimConfig) -> PooledEstimate:
    """Finite-band simulation of sequential hole filling.

    Each trial draws an independent SNR for every (user, sub-band) pair.
    User 1 transmits on sub-bands at or above the cutoff with rate
    ``log2(gamma/gamma0)``; user ``l + 1`` sees only the sub-bands user ``l``
    left void and applies the same rule with its own draws. Rates are
    averaged over the ``n_subbands`` sub-bands of a trial. ``void_fraction[l]``
    is the fraction of sub-bands offered to user ``l + 1`` that it left empty.
    """
    n_users = int(n_users)
    if n_users < 1:
        raise ValueError("need at least one user")
    nsb = cfg.n_subbands

    def kernel(rng, n):
        available = np.ones((n, nsb), dtype=bool)
        rates = []
        voids = []
        for _ in range(n_users):
            gamma = sample_rayleigh_snr(ch, rng, (n, nsb))
            above = gamma >= gamma0
            use = available & above
            rate = np.where(use, _capacity_rate(gamma, gamma0), 0.0).mean(axis=1)
            rates.append(rate)
            offered = available.sum()
            available = available & ~above
            voids.append((int(available.sum()), int(offered)))
        total = np.sum(rates, axis=0)
        return [_Moments.of(r) for r in rates], _Moments.of(total), voids

    parts = _run(cfg, kernel)
    per_user = tuple(_reduce(p[0][l] for p in parts) for l in range(n_users))
    total = _reduce(p[1] for p in parts)
    void = []
    for l in range(n_users):
        k = sum(p[2][l][0] for p in parts)
        m = sum(p[2][l][1] for p in parts)
        frac = k / m if m else 0.0
        se = math.sqrt(frac * (1.0 - frac) / m) if m else 0.0
        void.append(SimEstimate(frac, se, m))
    return PooledEstimate(per_user, total, tuple(void))


@dataclass(frozen=True)
class VrvpEstimate:
    rate: SimEstimate
    occupancy: np.ndarray  # no-transmission region first


def estimate_vrvp(ch: RayleighChannel, thresholds: SwitchingThresholds,
                  ladder: ConstellationLadder, cfg: SimConfig) -> VrvpEstimate:
    """Bin sampled SNRs into fading regions and average ``log2(M_j)``."""
    if len(thresholds) != len(ladder):
        raise ValueError("thresholds and ladder differ in length")
    edges = np.asarray(thresholds.gammas)
    bits = np.concatenate([[0.0], ladder.bits])

    def kernel(rng, n):
        region = np.searchsorted(edges, sample_rayleigh_snr(ch, rng, n), side="right")
        counts = np.bincount(region, minlength=len(bits))
        return _Moments.of(bits[region]), counts

    parts = _run(cfg, kernel)
    counts = np.sum([p[1] for p in parts], axis=0)
    return VrvpEstimate(_reduce(p[0] for p in parts), counts / cfg.n_trials)
