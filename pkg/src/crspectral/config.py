"""Line-oriented ``key = value`` run configuration and ladder files.

Sections: ``[sweep]``, ``[ladder]``, ``[arq]``, ``[per_model]``, ``[sim]``.
Unknown sections or keys are rejected. Floats are written with ``repr`` so
``parse_config(format_config(c)) == c`` holds exactly.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Optional

from .adaptive import ConstellationLadder, LADDERS
from .crosslayer import PerModel, PerModelError, load_per_model, parse_per_model

__all__ = [
    "ConfigError",
    "SnrGrid",
    "RunConfig",
    "parse_snr_grid",
    "parse_config",
    "format_config",
    "load_config",
    "parse_ladder",
    "resolve_ladder",
    "resolve_per_model",
]


class ConfigError(ValueError):
    """Invalid configuration value or file."""


@dataclass(frozen=True)
class SnrGrid:
    start: float
    stop: float
    step: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.start, self.stop, self.step)):
            raise ConfigError("SNR grid values must be finite")
        if not self.step > 0:
            raise ConfigError(f"SNR step must be positive, got {self.step!r}")
        if self.start > self.stop:
            raise ConfigError(f"SNR start {self.start!r} exceeds stop {self.stop!r}")

    def __len__(self) -> int:
        return int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1

    def values(self) -> list[float]:
        return [round(self.start + i * self.step, 10) for i in range(len(self))]

    def __str__(self) -> str:
        return f"{self.start!r}:{self.stop!r}:{self.step!r}"


def parse_snr_grid(text: str) -> SnrGrid:
    """``START:STOP:STEP`` in dB, or a single value."""
    parts = str(text).strip().split(":")
    try:
        nums = [float(p) for p in parts]
    except ValueError:
        raise ConfigError(f"bad SNR grid {text!r}; expected START:STOP:STEP") from None
    if len(nums) == 1:
        return SnrGrid(nums[0], nums[0], 1.0)
    if len(nums) != 3:
        raise ConfigError(f"bad SNR grid {text!r}; expected START:STOP:STEP")
    return SnrGrid(*nums)


@dataclass(frozen=True)
class RunConfig:
    """Every setting the CLI accepts; ``None`` means "not set here"."""

    snr_db: Optional[SnrGrid] = None
    users: Optional[int] = None
    ber: Optional[float] = None
    mode: Optional[str] = None
    ladder: Optional[str] = None
    ladder_sizes: Optional[tuple[int, ...]] = None
    ladder_names: Optional[tuple[str, ...]] = None
    nt_max: Optional[int] = None
    p_loss: Optional[float] = None
    per_model_file: Optional[str] = None
    per_model_lines: Optional[tuple[str, ...]] = None
    trials: Optional[int] = None
    subbands: Optional[int] = None
    seed: Optional[int] = None
    workers: Optional[int] = None

    def merged_over(self, base: "RunConfig") -> "RunConfig":
        """Values set here win over ``base``."""
        updates = {f.name: getattr(self, f.name) for f in fields(self)
                   if getattr(self, f.name) is not None}
        return replace(base, **updates)


# (section, key) -> (field, parser, formatter)
def _int(v: str) -> int:
    return int(v)


def _csv(v: str) -> tuple[str, ...]:
    return tuple(s.strip() for s in v.split(",") if s.strip())


_SCHEMA = {
    ("sweep", "snr_db"): ("snr_db", parse_snr_grid, str),
    ("sweep", "users"): ("users", _int, str),
    ("sweep", "ber"): ("ber", float, repr),
    ("sweep", "mode"): ("mode", str, str),
    ("ladder", "name"): ("ladder", str, str),
    ("ladder", "sizes"): ("ladder_sizes", lambda v: tuple(int(x) for x in _csv(v)),
                          lambda t: ", ".join(str(x) for x in t)),
    ("ladder", "names"): ("ladder_names", _csv, ", ".join),
    ("arq", "nt_max"): ("nt_max", _int, str),
    ("arq", "p_loss"): ("p_loss", float, repr),
    ("per_model", "file"): ("per_model_file", str, str),
    ("sim", "trials"): ("trials", _int, str),
    ("sim", "subbands"): ("subbands", _int, str),
    ("sim", "seed"): ("seed", _int, str),
    ("sim", "workers"): ("workers", _int, str),
}
_SECTIONS = {"sweep", "ladder", "arq", "per_model", "sim"}


def parse_config(text: str) -> RunConfig:
    cp = configparser.ConfigParser(interpolation=None, delimiters=("=",),
                                   comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(" ".join(str(exc).split())) from None
    values = {}
    per_lines = []
    for section in cp.sections():
        if section not in _SECTIONS:
            raise ConfigError(f"unknown section [{section}]")
        for key, raw in cp.items(section):
            if section == "per_model" and key.startswith("mode"):
                per_lines.append((key, raw.strip()))
                continue
            if (section, key) not in _SCHEMA:
                raise ConfigError(f"unknown key {key!r} in [{section}]")
            name, parse, _ = _SCHEMA[(section, key)]
            try:
                values[name] = parse(raw.strip())
            except (ValueError, TypeError) as exc:
                raise ConfigError(f"[{section}] {key}: {exc}") from None
    if per_lines:
        try:
            per_lines.sort(key=lambda kv: int(kv[0][4:]))
        except ValueError:
            raise ConfigError("per_model mode keys must be mode1, mode2, ...") from None
        values["per_model_lines"] = tuple(v for _, v in per_lines)
    return RunConfig(**values)


def format_config(cfg: RunConfig) -> str:
    out = {}
    for (section, key), (name, _, fmt) in _SCHEMA.items():
        v = getattr(cfg, name)
        if v is not None:
            out.setdefault(section, []).append(f"{key} = {fmt(v)}")
    if cfg.per_model_lines:
        for i, line in enumerate(cfg.per_model_lines, start=1):
            out.setdefault("per_model", []).append(f"mode{i} = {line}")
    blocks = [f"[{s}]\n" + "\n".join(lines) + "\n" for s, lines in out.items()]
    return "\n".join(blocks)


def load_config(path) -> RunConfig:
    return parse_config(Path(path).read_text())


def parse_ladder(text: str) -> ConstellationLadder:
    """Ladder file: one ``name M`` (or ``name, M``) per line, lowest order first."""
    sizes, names = [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace(",", " ").split()
        if len(parts) != 2:
            raise ConfigError(f"ladder line {lineno}: expected 'name M'")
        try:
            sizes.append(int(parts[1]))
        except ValueError:
            raise ConfigError(f"ladder line {lineno}: M must be an integer") from None
        names.append(parts[0])
    try:
        return ConstellationLadder(tuple(sizes), tuple(names))
    except ValueError as exc:
        raise ConfigError(f"ladder: {exc}") from None


def resolve_ladder(cfg: RunConfig) -> tuple[str, ConstellationLadder]:
    """Explicit sizes win; otherwise ``ladder`` is a built-in name or a file path."""
    if cfg.ladder_sizes:
        try:
            ladder = ConstellationLadder(cfg.ladder_sizes, cfg.ladder_names or ())
        except ValueError as exc:
            raise ConfigError(f"ladder: {exc}") from None
        return cfg.ladder or "custom", ladder
    name = cfg.ladder or "r5"
    if name in LADDERS:
        return name, LADDERS[name]
    path = Path(name)
    if path.is_file():
        return path.stem, parse_ladder(path.read_text())
    raise ConfigError(
        f"unknown ladder {name!r}; use one of {sorted(LADDERS)} or a ladder file"
    )


def resolve_per_model(cfg: RunConfig) -> Optional[PerModel]:
    try:
        if cfg.per_model_lines:
            return parse_per_model("\n".join(cfg.per_model_lines))
        if cfg.per_model_file:
            return load_per_model(cfg.per_model_file)
    except PerModelError as exc:
        raise ConfigError(f"per model: {exc}") from None
    return None
