"""Rayleigh channel model, water-filling cutoff and optimal-adaptation capacity.

All SNRs are linear power ratios; dB only appears through the two
conversion helpers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numerics import (
    DEFAULT_TOL,
    DomainError,
    Interval,
    Tolerance,
    exp_integral_e1,
    find_root,
)

__all__ = [
    "LOG2_E",
    "db_to_linear",
    "linear_to_db",
    "RayleighChannel",
    "rayleigh_pdf",
    "cutoff_residual",
    "solve_cutoff",
    "capacity_optimal",
    "water_filling_ratio",
]

LOG2_E = 1.0 / math.log(2.0)


def db_to_linear(db):
    if np.ndim(db):
        return 10.0 ** (np.asarray(db, dtype=float) / 10.0)
    return 10.0 ** (float(db) / 10.0)


def linear_to_db(x):
    if np.ndim(x):
        return 10.0 * np.log10(np.asarray(x, dtype=float))
    x = float(x)
    if not x > 0:
        raise DomainError(f"cannot express {x!r} in dB")
    return 10.0 * math.log10(x)


@dataclass(frozen=True)
class RayleighChannel:
    """Flat Rayleigh fading: the received SNR is exponential with mean ``avg_snr``."""

    avg_snr: float

    def __post_init__(self):
        if not (self.avg_snr > 0 and math.isfinite(self.avg_snr)):
            raise DomainError(f"average SNR must be positive and finite, got {self.avg_snr!r}")

    @classmethod
    def from_db(cls, snr_db: float) -> "RayleighChannel":
        return cls(db_to_linear(snr_db))

    @property
    def avg_snr_db(self) -> float:
        return linear_to_db(self.avg_snr)

    def pdf(self, gamma):
        return rayleigh_pdf(gamma, self)

    def prob_below(self, gamma: float) -> float:
        """P(instantaneous SNR < gamma)."""
        if math.isinf(gamma):
            return 1.0
        return -math.expm1(-gamma / self.avg_snr)


def rayleigh_pdf(gamma, ch: RayleighChannel):
    """SNR density ``exp(-gamma/avg)/avg``; accepts scalars or arrays."""
    g = np.asarray(gamma, dtype=float)
    if np.any(g < 0):
        raise DomainError("instantaneous SNR must be non-negative")
    out = np.exp(-g / ch.avg_snr) / ch.avg_snr
    return float(out) if out.ndim == 0 else out


def cutoff_residual(gamma0: float, avg_snr: float) -> float:
    """Closed-form average-power constraint minus one.

    ``int_{g0}^inf (1/g0 - 1/g) p(g) dg - 1`` evaluated for the exponential
    density. Decreases monotonically in ``gamma0`` from +inf to -1.
    """
    x = gamma0 / avg_snr
    return math.exp(-x) / gamma0 - exp_integral_e1(x) / avg_snr - 1.0


def solve_cutoff(ch: RayleighChannel, tol: Tolerance = DEFAULT_TOL) -> float:
    """Water-filling cutoff SNR ``gamma0`` meeting the average-power constraint.

    The root always lies in (0, 1). The lower end of the bracket starts at
    1e-12 and is halved until the residual is positive, which only matters
    for vanishingly small average SNR.
    """
    lo, hi = 1e-12, 1.0
    while cutoff_residual(lo, ch.avg_snr) <= 0.0:
        lo *= 0.5
        if lo < 1e-300:
            raise RuntimeError(f"could not bracket the cutoff for avg_snr={ch.avg_snr!r}")
    return find_root(lambda g0: cutoff_residual(g0, ch.avg_snr), Interval(lo, hi), tol)


def capacity_optimal(ch: RayleighChannel, tol: Tolerance = DEFAULT_TOL) -> float:
    """Capacity with optimal power and rate adaptation, bits/s/Hz.

    ``log2(e) * E1(gamma0/avg)``. On the power constraint this equals
    ``log2(e) * (exp(-x)/x - avg)`` with ``x = gamma0/avg``; the E1 form is
    used because it does not cancel catastrophically at high SNR.
    """
    gamma0 = solve_cutoff(ch, tol)
    return LOG2_E * exp_integral_e1(gamma0 / ch.avg_snr)


def water_filling_ratio(gamma, gamma0: float):
    """Transmit power over average power, ``max(0, 1/gamma0 - 1/gamma)``."""
    g = np.asarray(gamma, dtype=float)
    if np.any(g < 0):
        raise DomainError("instantaneous SNR must be non-negative")
    with np.errstate(divide="ignore"):
        out = np.where(g >= gamma0, 1.0 / gamma0 - 1.0 / np.where(g > 0, g, 1.0), 0.0)
    out = np.maximum(out, 0.0)
    return float(out) if out.ndim == 0 else out
