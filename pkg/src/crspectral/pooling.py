"""Spectrum pooling: hole-filling by secondary users and the L-user sum rate."""

from __future__ import annotations

from dataclasses import dataclass

from .fading import RayleighChannel, capacity_optimal, solve_cutoff
from .numerics import DEFAULT_TOL, DomainError, Tolerance

__all__ = [
    "band_factor_gain",
    "user_capacity",
    "sum_spectral_efficiency",
    "PoolingResult",
    "pool",
]


def _check_users(n_users: int) -> int:
    if int(n_users) != n_users or n_users < 1:
        raise DomainError(f"number of users must be an integer >= 1, got {n_users!r}")
    return int(n_users)


def band_factor_gain(ch: RayleighChannel, cutoff: float) -> float:
    """Fraction of the band a user leaves void: ``1 - exp(-cutoff/avg)``.

    This is the probability that a sub-band's instantaneous SNR falls below
    the cutoff, so the next user in line inherits it.
    """
    if not cutoff > 0:
        raise DomainError(f"cutoff must be positive, got {cutoff!r}")
    return ch.prob_below(cutoff)


def user_capacity(l: int, delta: float, c1: float) -> float:
    """Rate of the ``l``-th user in the pooling order: ``delta**(l-1) * c1``."""
    l = _check_users(l)
    return delta ** (l - 1) * c1


def sum_spectral_efficiency(n_users: int, delta: float, c1: float) -> float:
    """Sum rate of ``n_users`` users, ``(1 - delta**L)/(1 - delta) * c1``.

    Falls back to the continuous limit ``L * c1`` when ``delta`` is within
    1e-12 of one.
    """
    n_users = _check_users(n_users)
    if not 0.0 <= delta <= 1.0:
        raise DomainError(f"band factor gain must lie in [0, 1], got {delta!r}")
    if abs(1.0 - delta) <= 1e-12:
        return n_users * c1
    return (1.0 - delta**n_users) / (1.0 - delta) * c1


@dataclass(frozen=True)
class PoolingResult:
    avg_snr: float
    cutoff: float
    band_factor: float
    user_capacities: tuple[float, ...]
    sum_se: float

    @property
    def primary_capacity(self) -> float:
        return self.user_capacities[0]

    @property
    def gain(self) -> float:
        """Sum rate in excess of the primary user alone."""
        return self.sum_se - self.primary_capacity


def pool(ch: RayleighChannel, n_users: int, tol: Tolerance = DEFAULT_TOL) -> PoolingResult:
    n_users = _check_users(n_users)
    gamma0 = solve_cutoff(ch, tol)
    c1 = capacity_optimal(ch, tol)
    delta = band_factor_gain(ch, gamma0)
    caps = tuple(user_capacity(l, delta, c1) for l in range(1, n_users + 1))
    return PoolingResult(
        avg_snr=ch.avg_snr,
        cutoff=gamma0,
        band_factor=delta,
        user_capacities=caps,
        sum_se=sum_spectral_efficiency(n_users, delta, c1),
    )
