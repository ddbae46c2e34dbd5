"""Plain-text run configuration: strict key=value parsing and canonical output.

Format: one `key = value` pair per line; `#` starts a comment; blank lines
are ignored.  Unknown keys, malformed lines, duplicate keys, and
out-of-range values are errors that report the offending line number.
`config_text` writes every key in a fixed order so that
parse -> serialize -> parse is the identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

from .errors import ConfigError
from .grid import DIRICHLET, PERIODIC

PRESETS = ("uniform", "colliding_streams", "taylor_vortex")


@dataclass(frozen=True)
class RunConfig:
    """Validated parameters for a single run or a gamma sweep."""

    dim: int = 1
    cells: tuple = (128,)
    lengths: tuple = (1.0,)
    bc: str = PERIODIC
    sphere_degree: int = 7
    gamma: float = 10.0
    gammas: tuple = (5.0, 10.0, 20.0, 40.0, 80.0)
    mu: float = 1.0
    lam: float = 1.0
    d_trans: float = 1.0
    d_rot: float = 1.0
    preset: str = "colliding_streams"
    rho0: float = 0.9
    amplitude: float = 0.5
    eta0: float = 0.1
    perturbation: float = 0.0
    seed: int = 0
    t_final: float = 0.5
    cfl_safety: float = 0.45
    record_every: int = 10
    snapshot_every: int = 0
    outdir: str = "out"
    freeze_velocity: bool = False
    eps_congestion: float = 0.05

    def __post_init__(self):
        _validate(self)


# File key -> (attribute, parser).  "lambda" is a Python keyword, hence the
# attribute name `lam`.
def _parse_int(raw: str) -> int:
    return int(raw)


def _parse_float(raw: str) -> float:
    value = float(raw)
    if not math.isfinite(value):
        raise ValueError("value must be finite")
    return value


def _parse_str(raw: str) -> str:
    return raw


def _parse_bool(raw: str) -> bool:
    lowered = raw.lower()
    if lowered in ("true", "yes", "on", "1"):
        return True
    if lowered in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"expected a boolean (true/false), got {raw!r}")


def _parse_int_tuple(raw: str) -> tuple:
    return tuple(int(item.strip()) for item in raw.split(",") if item.strip())


def _parse_float_tuple(raw: str) -> tuple:
    vals = tuple(float(item.strip()) for item in raw.split(",") if item.strip())
    if any(not math.isfinite(v) for v in vals):
        raise ValueError("values must be finite")
    return vals


_KEYS = {
    "dim": ("dim", _parse_int),
    "cells": ("cells", _parse_int_tuple),
    "lengths": ("lengths", _parse_float_tuple),
    "bc": ("bc", _parse_str),
    "sphere_degree": ("sphere_degree", _parse_int),
    "gamma": ("gamma", _parse_float),
    "gammas": ("gammas", _parse_float_tuple),
    "mu": ("mu", _parse_float),
    "lambda": ("lam", _parse_float),
    "d_trans": ("d_trans", _parse_float),
    "d_rot": ("d_rot", _parse_float),
    "preset": ("preset", _parse_str),
    "rho0": ("rho0", _parse_float),
    "amplitude": ("amplitude", _parse_float),
    "eta0": ("eta0", _parse_float),
    "perturbation": ("perturbation", _parse_float),
    "seed": ("seed", _parse_int),
    "t_final": ("t_final", _parse_float),
    "cfl_safety": ("cfl_safety", _parse_float),
    "record_every": ("record_every", _parse_int),
    "snapshot_every": ("snapshot_every", _parse_int),
    "outdir": ("outdir", _parse_str),
    "freeze_velocity": ("freeze_velocity", _parse_bool),
    "eps_congestion": ("eps_congestion", _parse_float),
}

_ATTR_TO_KEY = {attr: key for key, (attr, _) in _KEYS.items()}


def _validate(cfg: RunConfig) -> None:
    if cfg.dim not in (1, 2):
        raise ConfigError(f"dim must be 1 or 2, got {cfg.dim}")
    if len(cfg.cells) != cfg.dim:
        raise ConfigError(f"cells must list {cfg.dim} entries, got {len(cfg.cells)}")
    if any(n < 4 for n in cfg.cells):
        raise ConfigError(f"each axis needs at least 4 cells, got {cfg.cells}")
    if len(cfg.lengths) != cfg.dim:
        raise ConfigError(f"lengths must list {cfg.dim} entries, got {len(cfg.lengths)}")
    if any(ell <= 0.0 for ell in cfg.lengths):
        raise ConfigError(f"domain lengths must be positive, got {cfg.lengths}")
    if cfg.bc not in (PERIODIC, DIRICHLET):
        raise ConfigError(f"bc must be {PERIODIC!r} or {DIRICHLET!r}, got {cfg.bc!r}")
    if cfg.sphere_degree < 2:
        raise ConfigError(f"sphere_degree must be at least 2, got {cfg.sphere_degree}")
    if cfg.gamma <= 1.5:
        raise ConfigError(f"gamma must exceed 3/2, got {cfg.gamma}")
    gs = cfg.gammas
    if not gs:
        raise ConfigError("gammas must list at least one value")
    if any(g <= 1.5 for g in gs):
        raise ConfigError(f"every sweep gamma must exceed 3/2, got {gs}")
    if any(b <= a for a, b in zip(gs, gs[1:])):
        raise ConfigError(f"sweep gammas must be strictly increasing, got {gs}")
    for name in ("mu", "lam", "d_trans", "d_rot"):
        if getattr(cfg, name) <= 0.0:
            raise ConfigError(f"{_ATTR_TO_KEY[name]} must be positive, got {getattr(cfg, name)}")
    if cfg.preset not in PRESETS:
        raise ConfigError(f"preset must be one of {PRESETS}, got {cfg.preset!r}")
    if not 0.0 < cfg.rho0 < 1.0:
        raise ConfigError(
            f"rho0 must lie in (0, 1) so the mean density stays below 1, got {cfg.rho0}"
        )
    if cfg.amplitude < 0.0:
        raise ConfigError(f"amplitude must be nonnegative, got {cfg.amplitude}")
    if cfg.eta0 < 0.0:
        raise ConfigError(f"eta0 must be nonnegative, got {cfg.eta0}")
    if not 0.0 <= cfg.perturbation <= cfg.rho0:
        raise ConfigError(
            f"perturbation must lie in [0, rho0] to keep the density nonnegative, got {cfg.perturbation}"
        )
    if cfg.t_final < 0.0:
        raise ConfigError(f"t_final must be nonnegative, got {cfg.t_final}")
    if not 0.0 < cfg.cfl_safety <= 1.0:
        raise ConfigError(f"cfl_safety must lie in (0, 1], got {cfg.cfl_safety}")
    if cfg.record_every < 1:
        raise ConfigError(f"record_every must be at least 1, got {cfg.record_every}")
    if cfg.snapshot_every < 0:
        raise ConfigError(f"snapshot_every must be nonnegative, got {cfg.snapshot_every}")
    if not cfg.outdir:
        raise ConfigError("outdir must be nonempty")
    if not 0.0 < cfg.eps_congestion < 1.0:
        raise ConfigError(f"eps_congestion must lie in (0, 1), got {cfg.eps_congestion}")


def parse_config(text: str) -> RunConfig:
    """Parse `key = value` lines into a validated RunConfig.

    Raises ConfigError with the 1-based line number for malformed lines,
    unknown or duplicate keys, unparsable values, and failed validation.
    """
    assignments = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw_line.strip()!r}")
        key, _, raw_value = line.partition("=")
        key = key.strip()
        raw_value = raw_value.strip()
        if key not in _KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in assignments:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        if not raw_value:
            raise ConfigError(f"line {lineno}: key {key!r} has an empty value")
        attr, parser = _KEYS[key]
        try:
            assignments[key] = (attr, parser(raw_value))
        except ValueError as err:
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {err}") from None
    kwargs = {attr: value for attr, value in assignments.values()}
    return RunConfig(**kwargs)


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return ", ".join(repr(v) if isinstance(v, float) else str(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def config_text(cfg: RunConfig) -> str:
    """Canonical serialization: every key, fixed order, exact round-trip."""
    lines = []
    for f in fields(cfg):
        lines.append(f"{_ATTR_TO_KEY[f.name]} = {_format_value(getattr(cfg, f.name))}")
    return "\n".join(lines) + "\n"


def load_config(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())
