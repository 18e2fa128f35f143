"""Parameter sweeps, oracle verification reports and the threshold table.

These are the computations behind the command line; each returns plain
column/row data so it can be used from Python as well.
"""

from __future__ import annotations

import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

from .adaptive import (
    DEFAULT_BER,
    LADDERS,
    ConstellationLadder,
    amc_cr_sum_se,
    solve_vrvp_cutoff,
    switching_thresholds,
    vrvp_continuous_se,
    vrvp_spectral_efficiency,
)
from .config import SnrGrid
from .crosslayer import ArqConfig, PerModel, cld_thresholds, cross_layer_point, default_per_model
from .fading import RayleighChannel, capacity_optimal, linear_to_db, solve_cutoff
from .oracle import (
    SimConfig,
    SimEstimate,
    estimate_capacity,
    estimate_hole_fraction,
    estimate_pooled_sum,
    estimate_vrvp,
)
from .pooling import band_factor_gain, pool

__all__ = [
    "MODES",
    "SweepSpec",
    "Table",
    "run_sweep",
    "VerifyReport",
    "verdict",
    "run_verify",
    "table1",
    "format_csv",
]

MODES = ("capacity", "pooling", "vrvp", "crosslayer")


@dataclass(frozen=True)
class SweepSpec:
    snr_db: SnrGrid = SnrGrid(0.0, 30.0, 1.0)
    users: int = 5
    ber: float = DEFAULT_BER
    ladder: ConstellationLadder = LADDERS["r5"]
    mode: str = "pooling"
    arq: ArqConfig = ArqConfig()
    per_model: Optional[PerModel] = None
    workers: int = 1

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; choose from {', '.join(MODES)}")
        if int(self.users) != self.users or self.users < 1:
            raise ValueError(f"users must be an integer >= 1, got {self.users!r}")
        if not 0.0 < self.ber < 0.2:
            raise ValueError(f"ber must lie in (0, 0.2), got {self.ber!r}")


@dataclass
class Table:
    columns: list[str]
    rows: list[tuple[float, ...]] = field(default_factory=list)

    def column(self, name: str) -> list[float]:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]


def _users_columns(users: int, prefix: str = "se") -> list[str]:
    return [f"{prefix}_L1"] + ([f"{prefix}_L{users}"] if users > 1 else [])


def _sweep_columns(spec: SweepSpec) -> list[str]:
    L = spec.users
    if spec.mode == "capacity":
        return ["snr_db", "cutoff_db", "capacity"]
    if spec.mode == "pooling":
        return ["snr_db"] + _users_columns(L) + ["gain", "band_factor"]
    if spec.mode == "vrvp":
        cols = ["snr_db"]
        for r in _region_counts(spec.ladder):
            cols += _users_columns(L, f"se_r{r}") + [f"gain_r{r}"]
        return cols + ["continuous_se"]
    return ["snr_db", "se_conventional"] + ([f"se_cr_L{L}"] if L > 1 else []) + [
        "gain", "per", "n_avg"]


def _region_counts(ladder: ConstellationLadder) -> list[int]:
    # full ladder first, then prefixes down to three regions
    n = ladder.n_regions
    return [n] + list(range(n - 1, 2, -1))


def _sweep_row(spec: SweepSpec, snr_db: float) -> tuple[float, ...]:
    ch = RayleighChannel.from_db(snr_db)
    L = spec.users
    if spec.mode == "capacity":
        return (snr_db, linear_to_db(solve_cutoff(ch)), capacity_optimal(ch))
    if spec.mode == "pooling":
        res = pool(ch, L)
        vals = [res.primary_capacity] + ([res.sum_se] if L > 1 else [])
        return (snr_db, *vals, res.gain, res.band_factor)
    if spec.mode == "vrvp":
        row = [snr_db]
        for r in _region_counts(spec.ladder):
            ladder = spec.ladder.prefix(r)
            s1 = amc_cr_sum_se(1, ch, spec.ber, ladder)
            sl = amc_cr_sum_se(L, ch, spec.ber, ladder)
            row += [s1] + ([sl] if L > 1 else []) + [sl - s1]
        row.append(vrvp_continuous_se(ch, solve_vrvp_cutoff(ch, spec.ber)))
        return tuple(row)
    per_model = spec.per_model or default_per_model()
    conv = cross_layer_point(1, ch, None, per_model, spec.arq)
    cr = cross_layer_point(L, ch, None, per_model, spec.arq)
    vals = [conv.sum_se] + ([cr.sum_se] if L > 1 else [])
    return (snr_db, *vals, cr.sum_se - conv.sum_se, conv.per, conv.n_avg)


def run_sweep(spec: SweepSpec) -> Table:
    """One row per grid point, in grid order regardless of worker count."""
    grid = spec.snr_db.values()
    if spec.workers > 1:
        with ThreadPoolExecutor(max_workers=spec.workers) as ex:
            rows = list(ex.map(lambda s: _sweep_row(spec, s), grid))
    else:
        rows = [_sweep_row(spec, s) for s in grid]
    return Table(_sweep_columns(spec), rows)


@dataclass
class VerifyReport:
    table: Table
    passed: bool
    max_abs_z: float


def verdict(z_scores: Sequence[float]) -> bool:
    """Pass when every |z| < 3, tolerating at most one point in [3, 4)."""
    z = [abs(v) for v in z_scores]
    if any(v >= 4.0 or math.isnan(v) for v in z):
        return False
    return sum(v >= 3.0 for v in z) <= 1


def _null_proportion(est: SimEstimate, p: float) -> SimEstimate:
    # Score-test error for a proportion: the plug-in sqrt(p_hat(1-p_hat)/n)
    # collapses when only a handful of events are observed.
    return replace(est, std_error=math.sqrt(p * (1.0 - p) / est.n_samples))


def run_verify(cfg: SimConfig, spec: SweepSpec) -> VerifyReport:
    """Closed form against Monte Carlo at every grid point.

    capacity: capacity and hole fraction; pooling: L-user sum rate over
    ``cfg.n_subbands`` sub-bands; vrvp: discrete VRVP rate; crosslayer:
    physical-layer rate over the cross-layer thresholds.
    """
    table = Table(["snr_db", "quantity", "closed_form", "oracle_mean", "std_error", "z"])
    base = cfg
    for i, snr_db in enumerate(spec.snr_db.values()):
        # independent stream per grid point so z-scores are not correlated
        cfg = replace(base, stream=i)
        ch = RayleighChannel.from_db(snr_db)
        checks = []
        if spec.mode == "capacity":
            g0 = solve_cutoff(ch)
            checks.append(("capacity", capacity_optimal(ch), estimate_capacity(ch, g0, cfg)))
            delta = band_factor_gain(ch, g0)
            checks.append(("band_factor", delta,
                           _null_proportion(estimate_hole_fraction(ch, g0, cfg), delta)))
        elif spec.mode == "pooling":
            res = pool(ch, spec.users)
            est = estimate_pooled_sum(spec.users, ch, res.cutoff, cfg)
            checks.append((f"sum_se_L{spec.users}", res.sum_se, est.total))
        elif spec.mode == "vrvp":
            th = switching_thresholds(solve_vrvp_cutoff(ch, spec.ber), spec.ladder)
            checks.append(("vrvp_se", vrvp_spectral_efficiency(ch, th, spec.ladder),
                           estimate_vrvp(ch, th, spec.ladder, cfg).rate))
        else:
            per_model = spec.per_model or default_per_model()
            th = cld_thresholds(per_model, spec.arq)
            ladder = per_model.ladder
            checks.append(("cld_physical_se", vrvp_spectral_efficiency(ch, th, ladder),
                           estimate_vrvp(ch, th, ladder, cfg).rate))
        for name, closed, est in checks:
            table.rows.append((snr_db, name, closed, est.mean, est.std_error,
                               est.z_score(closed)))
    zs = table.column("z")
    return VerifyReport(table, verdict(zs), max((abs(z) for z in zs), default=0.0))


def table1(avg_snr_db: float = 20.0, ber: float = DEFAULT_BER,
           ladder: ConstellationLadder = LADDERS["r5"],
           per_model: Optional[PerModel] = None,
           arq: ArqConfig = ArqConfig()) -> Table:
    """Switching thresholds in dB: VRVP at ``avg_snr_db`` and the cross-layer design."""
    per_model = per_model or default_per_model()
    ch = RayleighChannel.from_db(avg_snr_db)
    vrvp = switching_thresholds(solve_vrvp_cutoff(ch, ber), ladder).db
    cld = cld_thresholds(per_model, arq).db
    if len(cld) != len(vrvp):
        raise ValueError("PER model and ladder have different numbers of modes")
    cols = ["row", "No Transmit", *ladder.names]
    return Table(cols, [
        (f"avg_snr={avg_snr_db:g}dB", 0.0, *vrvp),
        (f"Nt={arq.nt_max}", 0.0, *cld),
    ])


def _fmt(v, digits: int) -> str:
    if isinstance(v, str):
        return v
    return f"{v:.{digits}g}"


def format_csv(table: Table, digits: int = 10, fixed: Optional[int] = None) -> str:
    """Comma-separated text with a header row.

    ``digits`` significant digits by default; ``fixed`` switches to that many
    decimal places.
    """
    buf = io.StringIO()
    buf.write(",".join(table.columns) + "\n")
    for row in table.rows:
        if fixed is not None:
            cells = [v if isinstance(v, str) else f"{v:.{fixed}f}" for v in row]
        else:
            cells = [_fmt(v, digits) for v in row]
        buf.write(",".join(cells) + "\n")
    return buf.getvalue()
