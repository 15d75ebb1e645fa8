"""Experiment presets and the flat ``key = value`` config format.

Example config::

    # anything after '#' is ignored
    name    = my-run
    theta   = pi/10
    delta   = pi, pi/10, pi/50      # radians; list sweeps the channel pair
    N       = 100
    trials  = 100
    snr_db  = 0, 10, 20
    M       = 4, 5
    methods = SS, SSS
    seed    = 7

Angles accept plain numbers or expressions in ``pi`` (``pi/10``,
``2*pi/3``, ``0.5pi``). An explicit channel replaces ``theta``/``delta``:
either ``channel_file = taps.csv`` (one subchannel per line, comma-separated
complex taps) or inline ``taps = 1+0j, 0.5j; 0.2, 1`` with rows separated by
``;``. Run manifests are written in this same format and can be fed back
with ``--config``.
"""
from __future__ import annotations

import math
import re
from dataclasses import replace
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .evaluation import METHODS, ExperimentConfig
from .signal_model import ChannelSet

DEFAULT_SNR_GRID = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)
WINDOW_CHANNEL_FILE = "window_channels_m3_L5.csv"


class ConfigError(ValueError):
    """Config text that cannot be parsed; ``line`` is 1-based (0 if not line-specific)."""

    def __init__(self, message: str, line: int = 0, source: str = "<config>"):
        self.line = line
        self.source = source
        where = f"{source}:{line}: " if line else f"{source}: "
        super().__init__(where + message)


_ANGLE = re.compile(r"^\s*([+-]?\d*\.?\d*(?:[eE][+-]?\d+)?)\s*\*?\s*pi\s*(?:/\s*(\d*\.?\d+))?\s*$")


def parse_angle(text: str) -> float:
    """Parse ``'pi/10'``, ``'2*pi/3'``, ``'-pi'`` or a plain float (radians)."""
    s = text.strip().lower()
    m = _ANGLE.match(s)
    if m:
        coef, den = m.groups()
        if coef in ("", "+"):
            c = 1.0
        elif coef == "-":
            c = -1.0
        else:
            c = float(coef)
        return c * math.pi / (float(den) if den else 1.0)
    return float(s)


def format_angle(x: float) -> str:
    return repr(float(x))


def load_channel_file(path) -> ChannelSet:
    """Read a tap file: one subchannel per line, comma-separated complex values."""
    return parse_taps(Path(path).read_text(), source=str(path))


def parse_taps(text: str, source: str = "<taps>", sep: str = "\n") -> ChannelSet:
    rows = []
    for lineno, line in enumerate(text.split(sep), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            rows.append([complex(tok.strip().replace(" ", "")) for tok in line.split(",")])
        except ValueError as exc:
            raise ConfigError(f"bad complex tap value ({exc})", lineno if sep == "\n" else 0,
                              source) from None
    if not rows or len({len(r) for r in rows}) != 1:
        raise ConfigError("taps must form a nonempty rectangular m x L table", 0, source)
    return ChannelSet(np.array(rows))


def window_channel_set() -> ChannelSet:
    """The fixed m=3, L=5 channel set shipped for the window-length experiment."""
    text = resources.files("blindfir.data").joinpath(WINDOW_CHANNEL_FILE).read_text()
    return parse_taps(text, source=WINDOW_CHANNEL_FILE)


def preset(name: str) -> ExperimentConfig:
    """Configuration for one of the named reference experiments."""
    theta = math.pi / 10
    if name == "exp1-well":
        return ExperimentConfig(name=name, theta=theta, deltas=(math.pi,))
    if name == "exp2-ill":
        return ExperimentConfig(name=name, theta=theta, deltas=(math.pi / 10,))
    if name == "exp2-severe":
        return ExperimentConfig(name=name, theta=theta, deltas=(math.pi / 50,))
    if name == "exp3-delta-sweep":
        deltas = tuple(float(d) for d in np.geomspace(math.pi / 100, math.pi, 20))
        return ExperimentConfig(name=name, theta=theta, deltas=deltas, snr_grid_db=(10.0,))
    if name == "exp4-window-sweep":
        return ExperimentConfig(name=name, theta=None, deltas=(), channel=window_channel_set(),
                                windows=(3, 4, 5, 6))
    raise KeyError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")


PRESETS = ("exp1-well", "exp2-ill", "exp2-severe", "exp3-delta-sweep", "exp4-window-sweep")


def _floats(v: str) -> tuple[float, ...]:
    return tuple(float(x) for x in v.split(",") if x.strip())


def _ints(v: str) -> tuple[int, ...]:
    return tuple(int(x) for x in v.split(",") if x.strip())


def _bool(v: str) -> bool:
    s = v.strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {v!r}")


_KEYS = {
    "name": ("name", str.strip),
    "theta": ("theta", parse_angle),
    "delta": ("deltas", lambda v: tuple(parse_angle(x) for x in v.split(",") if x.strip())),
    "n": ("N", int),
    "trials": ("n_trials", int),
    "snr_db": ("snr_grid_db", _floats),
    "m": ("windows", _ints),
    "methods": ("methods", lambda v: tuple(x.strip().upper() for x in v.split(",") if x.strip())),
    "seed": ("master_seed", int),
    "noiseless": ("noiseless", _bool),
}


def parse_config(text: str, source: str = "<config>", base_dir=None) -> ExperimentConfig:
    """Parse config text into an :class:`ExperimentConfig`.

    Unset keys keep the :class:`ExperimentConfig` defaults. Errors carry the
    offending line number.
    """
    values: dict = {}
    seen: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", lineno, source)
        key, value = (s.strip() for s in line.split("=", 1))
        lkey = key.lower()
        if lkey in seen:
            raise ConfigError(f"duplicate key {key!r} (first set on line {seen[lkey]})", lineno,
                              source)
        seen[lkey] = lineno
        try:
            if lkey in _KEYS:
                field_name, conv = _KEYS[lkey]
                values[field_name] = conv(value)
            elif lkey == "channel_file":
                path = Path(value)
                if base_dir is not None and not path.is_absolute():
                    path = Path(base_dir) / path
                values["channel"] = load_channel_file(path)
            elif lkey == "taps":
                values["channel"] = parse_taps(value, source=source, sep=";")
            else:
                raise ConfigError(f"unknown key {key!r}", lineno, source)
        except ConfigError as exc:
            if exc.line:
                raise
            raise ConfigError(str(exc).split(": ", 1)[-1], lineno, source) from None
        except (ValueError, OSError) as exc:
            raise ConfigError(f"bad value for {key!r}: {exc}", lineno, source) from None
    if "channel" in values:
        values.setdefault("theta", None)
        values.setdefault("deltas", ())
    if "methods" in values and not set(values["methods"]) <= set(METHODS):
        raise ConfigError(f"methods must be drawn from {', '.join(METHODS)}",
                          seen.get("methods", 0), source)
    try:
        return ExperimentConfig(**values)
    except ValueError as exc:
        raise ConfigError(str(exc), 0, source) from None


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", 0, str(path)) from None
    return parse_config(text, source=str(path), base_dir=path.parent)


def format_manifest(cfg: ExperimentConfig, extra: dict | None = None) -> str:
    """Every resolved parameter, in config syntax, so the run can be replayed."""
    lines = [f"# blindfir {__version__} run manifest",
             "# replay with: blindfir custom --config <this file>"]
    for k, v in (extra or {}).items():
        lines.append(f"# {k}: {v}")
    lines.append(f"name = {cfg.name}")
    if cfg.channel is not None:
        rows = "; ".join(", ".join(repr(complex(z)) for z in row) for row in cfg.channel.taps)
        lines.append(f"taps = {rows}")
    else:
        lines.append(f"theta = {format_angle(cfg.theta)}")
        lines.append("delta = " + ", ".join(format_angle(d) for d in cfg.deltas))
    lines.append(f"N = {cfg.N}")
    lines.append(f"trials = {cfg.n_trials}")
    lines.append("snr_db = " + ", ".join(repr(float(s)) for s in cfg.snr_grid_db))
    lines.append("M = " + ", ".join(str(M) for M in cfg.windows))
    lines.append("methods = " + ", ".join(cfg.methods))
    lines.append(f"seed = {cfg.master_seed}")
    lines.append(f"noiseless = {str(cfg.noiseless).lower()}")
    return "\n".join(lines) + "\n"


def override(cfg: ExperimentConfig, *, seed=None, snr_grid=None, trials=None) -> ExperimentConfig:
    changes = {}
    if seed is not None:
        changes["master_seed"] = seed
    if snr_grid is not None:
        changes["snr_grid_db"] = tuple(snr_grid)
    if trials is not None:
        changes["n_trials"] = trials
    return replace(cfg, **changes) if changes else cfg
