"""Command line: ``crspectral {sweep,verify,table1}``.

Settings are resolved per key in this order: command-line flag, environment
variable ``CRSPECTRAL_<KEY>`` (e.g. ``CRSPECTRAL_SEED``, ``CRSPECTRAL_SNR_DB``),
``--config`` file, built-in default.

Exit codes: 0 success, 1 verification failed, 2 usage, 3 configuration,
4 numerical or domain error, 5 file I/O. Errors print one line to stderr:
``crspectral: error: <kind>: <reason>``.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Optional, Sequence

from . import __version__
from .config import ConfigError, RunConfig, load_config, parse_snr_grid, resolve_ladder, resolve_per_model
from .crosslayer import ArqConfig
from .numerics import AccuracyError, BracketError, ConvergenceError, DomainError
from .oracle import SimConfig
from .sweep import MODES, SweepSpec, format_csv, run_sweep, run_verify, table1

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_NUMERIC = 4
EXIT_IO = 5

ENV_PREFIX = "CRSPECTRAL_"

DEFAULTS = RunConfig(
    snr_db=parse_snr_grid("0:30:1"),
    users=5,
    ber=1e-3,
    mode="pooling",
    ladder="r5",
    nt_max=3,
    p_loss=0.01,
    trials=100_000,
    subbands=64,
    seed=42,
    workers=1,
)

# flag dest -> (RunConfig field, parser)
_KEYS = {
    "snr_db": parse_snr_grid,
    "users": int,
    "ber": float,
    "mode": str,
    "ladder": str,
    "nt_max": int,
    "p_loss": float,
    "per_model_file": str,
    "trials": int,
    "subbands": int,
    "seed": int,
    "workers": int,
}


class CliError(Exception):
    def __init__(self, kind: str, message: str, code: int):
        super().__init__(message)
        self.kind = kind
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError("usage", message, EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="crspectral",
                     description="Spectral efficiency of a spectrum-pooling cognitive radio.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def common(p, sim: bool):
        p.add_argument("--config", help="key = value configuration file")
        p.add_argument("--snr-db", dest="snr_db", metavar="START:STOP:STEP",
                       help="average SNR grid in dB (default 0:30:1)")
        p.add_argument("--users", type=int, help="number of pooled users L (default 5)")
        p.add_argument("--ber", type=float, help="target bit error rate (default 1e-3)")
        p.add_argument("--ladder", help="built-in ladder r5|r4|r3 or a ladder file")
        p.add_argument("--mode", help=f"one of {', '.join(MODES)} (default pooling)")
        p.add_argument("--nt-max", dest="nt_max", type=int, help="ARQ transmission cap (default 3)")
        p.add_argument("--p-loss", dest="p_loss", type=float,
                       help="packet loss target after all attempts (default 0.01)")
        p.add_argument("--per-model", dest="per_model_file", help="PER model file")
        p.add_argument("--workers", type=int, help="parallel workers (default 1)")
        if sim:
            p.add_argument("--trials", type=int, help="Monte Carlo trials (default 100000)")
            p.add_argument("--subbands", type=int, help="sub-bands per trial (default 64)")
            p.add_argument("--seed", type=int, help="RNG seed (default 42)")
        p.add_argument("--out", help="write CSV here instead of stdout")

    common(sub.add_parser("sweep", help="emit figure data as CSV"), sim=False)
    common(sub.add_parser("verify", help="closed forms against Monte Carlo"), sim=True)
    common(sub.add_parser("table1", help="VRVP vs cross-layer switching thresholds"), sim=False)
    return parser


def _from_env(environ) -> RunConfig:
    values = {}
    for key, parse in _KEYS.items():
        env_key = ENV_PREFIX + key.upper()
        if env_key in environ:
            try:
                values[key] = parse(environ[env_key])
            except ValueError as exc:
                raise ConfigError(f"{env_key}: {exc}") from None
    return RunConfig(**values)


def _from_args(args) -> RunConfig:
    values = {}
    for key, parse in _KEYS.items():
        v = getattr(args, key, None)
        if v is not None:
            values[key] = parse(v) if isinstance(v, str) else v
    return RunConfig(**values)


def resolve(args, environ=None) -> RunConfig:
    environ = os.environ if environ is None else environ
    cfg = DEFAULTS
    if getattr(args, "config", None):
        cfg = load_config(args.config).merged_over(cfg)
    cfg = _from_env(environ).merged_over(cfg)
    return _from_args(args).merged_over(cfg)


def _spec(cfg: RunConfig) -> SweepSpec:
    _, ladder = resolve_ladder(cfg)
    try:
        return SweepSpec(
            snr_db=cfg.snr_db,
            users=cfg.users,
            ber=cfg.ber,
            ladder=ladder,
            mode=cfg.mode,
            arq=ArqConfig(cfg.nt_max, cfg.p_loss),
            per_model=resolve_per_model(cfg),
            workers=cfg.workers,
        )
    except DomainError as exc:
        raise ConfigError(str(exc)) from None


def _write(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dispatch(args, environ) -> int:
    if args.command is None:
        raise CliError("usage", "a subcommand is required: sweep, verify or table1", EXIT_USAGE)
    cfg = resolve(args, environ)
    if cfg.mode not in MODES:
        raise CliError("usage", f"unknown mode {cfg.mode!r}; choose from {', '.join(MODES)}",
                       EXIT_USAGE)
    try:
        spec = _spec(cfg)
    except ValueError as exc:
        if isinstance(exc, ConfigError) and "unknown ladder" in str(exc):
            raise CliError("usage", str(exc), EXIT_USAGE) from None
        raise ConfigError(str(exc)) from None

    if args.command == "sweep":
        _write(format_csv(run_sweep(spec)), args.out)
        return EXIT_OK
    if args.command == "table1":
        snr = spec.snr_db.start if args.snr_db else 20.0
        _write(format_csv(table1(snr, spec.ber, spec.ladder, spec.per_model, spec.arq),
                          fixed=4), args.out)
        return EXIT_OK
    try:
        sim = SimConfig(n_subbands=cfg.subbands, n_trials=cfg.trials, seed=cfg.seed,
                        workers=cfg.workers)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    report = run_verify(sim, spec)
    _write(format_csv(report.table), args.out)
    status = "PASS" if report.passed else "FAIL"
    print(f"verify: {status} points={len(report.table.rows)} max_abs_z={report.max_abs_z:.3f}",
          file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_VERIFY_FAILED


def main(argv: Optional[Sequence[str]] = None, environ=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return _dispatch(args, environ)
    except CliError as exc:
        err, code, kind = exc, exc.code, exc.kind
    except ConfigError as exc:
        err, code, kind = exc, EXIT_CONFIG, "config"
    except (DomainError, BracketError, ConvergenceError, AccuracyError, ArithmeticError) as exc:
        err, code, kind = exc, EXIT_NUMERIC, "numeric"
    except OSError as exc:
        err, code, kind = exc, EXIT_IO, "io"
    reason = " ".join(str(err).split())
    print(f"crspectral: error: {kind}: {reason}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
