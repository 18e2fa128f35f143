"""Adaptive modulation combined with truncated ARQ.

The physical-layer rate is divided by the mean number of transmissions per
packet. Switching thresholds come from per-mode packet error rate curves
``PER_n(gamma) = min(1, a_n exp(-g_n gamma))``: mode ``n`` switches on where
its PER meets the per-attempt target ``p_loss ** (1/nt_max)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np

from .adaptive import (
    ConstellationLadder,
    SwitchingThresholds,
    region_probabilities,
    vrvp_spectral_efficiency,
)
from .fading import RayleighChannel, db_to_linear
from .numerics import DomainError
from .pooling import sum_spectral_efficiency

__all__ = [
    "ArqConfig",
    "PerMode",
    "PerModel",
    "PerModelError",
    "parse_per_model",
    "load_per_model",
    "default_per_model",
    "avg_transmissions",
    "per_of_mode",
    "cld_thresholds",
    "avg_per",
    "cross_layer_se",
    "CrossLayerPoint",
    "cross_layer_point",
    "cld_cr_sum_se",
]


@dataclass(frozen=True)
class ArqConfig:
    nt_max: int = 3
    p_loss: float = 0.01

    def __post_init__(self):
        if int(self.nt_max) != self.nt_max or self.nt_max < 1:
            raise DomainError(f"nt_max must be an integer >= 1, got {self.nt_max!r}")
        if not 0.0 < self.p_loss < 1.0:
            raise DomainError(f"p_loss must lie in (0, 1), got {self.p_loss!r}")

    @property
    def p_target(self) -> float:
        """Per-attempt PER that meets ``p_loss`` after ``nt_max`` attempts."""
        return self.p_loss ** (1.0 / self.nt_max)


class PerModelError(ValueError):
    """Malformed PER model file."""


@dataclass(frozen=True)
class PerMode:
    name: str
    m: int
    threshold_db: float
    a: Optional[float] = None
    g: Optional[float] = None

    @property
    def has_curve(self) -> bool:
        return self.a is not None

    @property
    def pivot(self) -> float:
        """SNR below which the fitted PER is clamped to one."""
        if not self.has_curve:
            return db_to_linear(self.threshold_db)
        return max(0.0, math.log(self.a) / self.g)


@dataclass(frozen=True)
class PerModel:
    modes: tuple[PerMode, ...]

    def __post_init__(self):
        if not self.modes:
            raise PerModelError("PER model has no modes")

    def __len__(self) -> int:
        return len(self.modes)

    @property
    def ladder(self) -> ConstellationLadder:
        return ConstellationLadder(tuple(md.m for md in self.modes),
                                   tuple(md.name for md in self.modes))


def _number(text: str, what: str, lineno: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise PerModelError(f"line {lineno}: {what} is not a number: {text!r}") from None
    if not math.isfinite(value):
        raise PerModelError(f"line {lineno}: {what} must be finite")
    return value


def parse_per_model(text: str) -> PerModel:
    """Parse ``name, M, threshold_db[, a, g]`` lines; ``#`` starts a comment."""
    modes = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = [f.strip() for f in line.split(",")]
        if len(fields) not in (3, 5):
            raise PerModelError(
                f"line {lineno}: expected 3 or 5 comma-separated fields, got {len(fields)}"
            )
        name = fields[0]
        if not name:
            raise PerModelError(f"line {lineno}: empty mode name")
        try:
            m = int(fields[1])
        except ValueError:
            raise PerModelError(f"line {lineno}: M is not an integer: {fields[1]!r}") from None
        if m < 2:
            raise PerModelError(f"line {lineno}: M must be >= 2")
        thr = _number(fields[2], "threshold_db", lineno)
        a = g = None
        if len(fields) == 5:
            a = _number(fields[3], "a", lineno)
            g = _number(fields[4], "g", lineno)
            if a <= 0 or g <= 0:
                raise PerModelError(f"line {lineno}: a and g must be positive")
        modes.append(PerMode(name, m, thr, a, g))
    model = PerModel(tuple(modes))
    try:
        model.ladder
    except ValueError as exc:
        raise PerModelError(str(exc)) from None
    return model


def load_per_model(path) -> PerModel:
    return parse_per_model(Path(path).read_text())


def default_per_model() -> PerModel:
    text = resources.files("crspectral").joinpath("data/per_default.txt").read_text()
    return parse_per_model(text)


def avg_transmissions(p: float, nt_max: int) -> float:
    """Mean attempts per packet under truncated ARQ: ``sum_{n<nt_max} p**n``."""
    if not 0.0 <= p < 1.0:
        raise DomainError(f"packet error rate must lie in [0, 1), got {p!r}")
    if int(nt_max) != nt_max or nt_max < 1:
        raise DomainError(f"nt_max must be an integer >= 1, got {nt_max!r}")
    return math.fsum(p**n for n in range(int(nt_max)))


def per_of_mode(gamma, mode: PerMode, p_target: Optional[float] = None):
    """Packet error rate of ``mode`` at linear SNR ``gamma``.

    Modes without fitted ``(a, g)`` use a step: one below the threshold,
    ``p_target`` at and above it.
    """
    g = np.asarray(gamma, dtype=float)
    if np.any(g < 0):
        raise DomainError("instantaneous SNR must be non-negative")
    if mode.has_curve:
        out = np.minimum(1.0, mode.a * np.exp(-mode.g * g))
    else:
        if p_target is None:
            raise ValueError(f"mode {mode.name!r} has no PER curve; p_target is required")
        out = np.where(g < db_to_linear(mode.threshold_db), 1.0, p_target)
    return float(out) if out.ndim == 0 else out


def cld_thresholds(per_model: PerModel, arq: ArqConfig) -> SwitchingThresholds:
    """Switching thresholds at which each mode's PER meets the per-attempt target."""
    pt = arq.p_target
    gammas = []
    for mode in per_model.modes:
        if not mode.has_curve:
            gammas.append(db_to_linear(mode.threshold_db))
            continue
        if pt >= mode.a:
            raise DomainError(
                f"mode {mode.name!r} cannot reach PER {pt:.6g} (amplitude {mode.a:.6g})"
            )
        gammas.append(math.log(mode.a / pt) / mode.g)
    return SwitchingThresholds(tuple(gammas))


def _region_per_mass(ch: RayleighChannel, mode: PerMode, lo: float, hi: float,
                     p_target: Optional[float]) -> float:
    # int_lo^hi PER(gamma) p(gamma) dgamma, split at the clamp pivot
    if hi <= lo:
        return 0.0
    pivot = min(max(mode.pivot, lo), hi)
    below = ch.prob_below(pivot) - ch.prob_below(lo)
    if pivot >= hi:
        return below
    if not mode.has_curve:
        if p_target is None:
            raise ValueError(f"mode {mode.name!r} has no PER curve; p_target is required")
        return below + p_target * (ch.prob_below(hi) - ch.prob_below(pivot))
    c = mode.g + 1.0 / ch.avg_snr
    top = 0.0 if math.isinf(hi) else math.exp(-c * hi)
    above = mode.a / (ch.avg_snr * c) * (math.exp(-c * pivot) - top)
    return below + above


def avg_per(ch: RayleighChannel, thresholds: SwitchingThresholds,
            ladder: ConstellationLadder, per_model: PerModel,
            p_target: Optional[float] = None) -> float:
    """Rate-weighted average PER over the transmitting regions.

    ``sum_n log2(M_n) int_{region n} PER_n p  /  sum_n log2(M_n) P(region n)``,
    zero when nothing is ever transmitted.
    """
    if not len(thresholds) == len(ladder) == len(per_model):
        raise ValueError("thresholds, ladder and PER model must have equal length")
    edges = thresholds.edges
    probs = region_probabilities(ch, thresholds)[1:]
    num = math.fsum(
        b * _region_per_mass(ch, mode, edges[n], edges[n + 1], p_target)
        for n, (b, mode) in enumerate(zip(ladder.bits, per_model.modes))
    )
    den = math.fsum(b * p for b, p in zip(ladder.bits, probs))
    if den <= 0.0:
        return 0.0
    return num / den


def cross_layer_se(se_physical: float, p: float, nt_max: int) -> float:
    """Spectral efficiency after truncated ARQ: physical rate / mean attempts."""
    return se_physical / avg_transmissions(p, nt_max)


@dataclass(frozen=True)
class CrossLayerPoint:
    avg_snr: float
    thresholds: SwitchingThresholds
    se_physical: float
    per: float
    n_avg: float
    se_cross_layer: float
    band_factor: float
    n_users: int
    sum_se: float


def cross_layer_point(n_users: int, ch: RayleighChannel,
                      ladder: Optional[ConstellationLadder] = None,
                      per_model: Optional[PerModel] = None,
                      arq: Optional[ArqConfig] = None,
                      per_override: Optional[float] = None) -> CrossLayerPoint:
    """Full cross-layer pipeline at one average SNR.

    The first switching threshold doubles as the sensing cutoff for the
    band factor. ``per_override`` replaces the rate-weighted average PER.
    """
    per_model = per_model if per_model is not None else default_per_model()
    arq = arq if arq is not None else ArqConfig()
    if ladder is None:
        ladder = per_model.ladder
    elif ladder.sizes != per_model.ladder.sizes:
        raise ValueError(
            f"ladder {ladder.sizes} does not match PER model {per_model.ladder.sizes}"
        )
    thresholds = cld_thresholds(per_model, arq)
    se_phys = vrvp_spectral_efficiency(ch, thresholds, ladder)
    if per_override is None:
        p = avg_per(ch, thresholds, ladder, per_model, arq.p_target)
    else:
        p = float(per_override)
    n_avg = avg_transmissions(p, arq.nt_max)
    se_cl = se_phys / n_avg
    delta = ch.prob_below(thresholds.gammas[0])
    return CrossLayerPoint(
        avg_snr=ch.avg_snr,
        thresholds=thresholds,
        se_physical=se_phys,
        per=p,
        n_avg=n_avg,
        se_cross_layer=se_cl,
        band_factor=delta,
        n_users=int(n_users),
        sum_se=sum_spectral_efficiency(n_users, delta, se_cl),
    )


def cld_cr_sum_se(n_users: int, ch: RayleighChannel,
                  ladder: Optional[ConstellationLadder] = None,
                  per_model: Optional[PerModel] = None,
                  arq: Optional[ArqConfig] = None,
                  per_override: Optional[float] = None) -> float:
    """Sum spectral efficiency of ``n_users`` pooled users under cross-layer design."""
    return cross_layer_point(n_users, ch, ladder, per_model, arq, per_override).sum_se
