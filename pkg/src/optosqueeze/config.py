"""Flat ``section.key = value`` run configuration.

Lines are ``key = value``; ``#`` starts a comment. Keys carry a section
prefix (``params.kappa``, ``floquet.b_0``, ``sweep.range``). Defaults
reproduce the reference parameter set used throughout the tests.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from typing import Optional

import numpy as np

from .classical import DriveModulation
from .errors import ConfigError, InvalidConfig
from .params import FloquetAmplitudes, SystemParams, validate_params

MODES = ("rwa", "full")
A2C_SIGNS = ("printed", "positive")


@dataclass(frozen=True)
class SweepRange:
    lo: float
    hi: float
    n: int

    def __post_init__(self):
        if self.n < 1 or not math.isfinite(self.lo) or not math.isfinite(self.hi):
            raise InvalidConfig("sweep range needs finite bounds and at least one point")
        if self.n > 1 and not self.hi > self.lo:
            raise InvalidConfig("sweep range must be ordered lo < hi")

    @classmethod
    def parse(cls, text: str) -> "SweepRange":
        parts = text.split(":")
        if len(parts) != 3:
            raise InvalidConfig(f"range must look like LO:HI:N, got {text!r}")
        try:
            return cls(float(parts[0]), float(parts[1]), int(parts[2]))
        except ValueError as exc:
            raise InvalidConfig(f"bad range {text!r}") from exc

    def __str__(self) -> str:
        return f"{_fmt(self.lo)}:{_fmt(self.hi)}:{self.n}"

    def values(self, log: bool = False):
        if log:
            if not (self.lo > 0 and self.hi > 0):
                raise InvalidConfig("logarithmic sweeps need positive bounds")
            return np.geomspace(self.lo, self.hi, self.n)
        return np.linspace(self.lo, self.hi, self.n)


@dataclass(frozen=True)
class RunConfig:
    params: SystemParams = field(default_factory=SystemParams)
    floquet: FloquetAmplitudes = field(default_factory=FloquetAmplitudes)
    drive: Optional[DriveModulation] = None
    mode: str = "rwa"
    t_end: float = 1000.0
    dt: Optional[float] = None
    t_settle: float = 500.0
    record_every: int = 10
    workers: int = 1
    a2c_sign: str = "printed"
    sweep_axis: Optional[str] = None
    sweep_range: Optional[SweepRange] = None
    log_axis: bool = False
    sideband_ratio: float = 2.5
    inner_range: SweepRange = field(default_factory=lambda: SweepRange(0.0, 600.0, 200))
    kappas: tuple = (0.1, 1.0)
    wigner_n: int = 201
    wigner_extent: float = 5.0
    spectrum_range: SweepRange = field(default_factory=lambda: SweepRange(-1.0, 1.0, 401))
    quad_epsrel: float = 1e-10

    def __post_init__(self):
        if self.mode not in MODES:
            raise InvalidConfig(f"mode must be one of {MODES}")
        if self.a2c_sign not in A2C_SIGNS:
            raise InvalidConfig(f"a2c_sign must be one of {A2C_SIGNS}")
        if self.record_every < 1 or self.workers < 1 or self.wigner_n < 2:
            raise InvalidConfig("record_every, workers and wigner.n must be positive")
        if not self.kappas or any(not k > 0 for k in self.kappas):
            raise InvalidConfig("kappas must be a non-empty list of positive rates")
        validate_params(self.params)


def _fmt(x) -> str:
    if x is None:
        return "none"
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, complex):
        return repr(x.real) if x.imag == 0 else repr(x)
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _float(text: str) -> float:
    return float(text)


def _opt_float(text: str) -> Optional[float]:
    return None if text.lower() in ("none", "auto", "") else float(text)


def _complex(text: str) -> complex | float:
    z = complex(text.replace(" ", ""))
    return z.real if z.imag == 0 else z


def _bool(text: str) -> bool:
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _floats(text: str) -> tuple:
    return tuple(float(x) for x in text.split(",") if x.strip())


def _opt_str(text: str) -> Optional[str]:
    return None if text.lower() in ("none", "") else text


def _opt_range(text: str) -> Optional[SweepRange]:
    return None if text.lower() in ("none", "") else SweepRange.parse(text)


# key -> (target, attribute, parser)
_PARAM_KEYS = {
    "kappa": _float,
    "gamma": _float,
    "g": _float,
    "n_a": _float,
    "n_b": _float,
    "eta": _float,
    "detuning": _opt_float,
    "detuning_bare": _opt_float,
    "omega_m": _float,
}
_FLOQUET_KEYS = {
    "a_m1": _complex,
    "a_0": _complex,
    "a_1": _complex,
    "b_m1": _complex,
    "b_0": _complex,
    "b_1": _complex,
    "Omega_a": _float,
    "Omega_b": _float,
}
_DRIVE_KEYS = {"eps_m1": _complex, "eps_0": _complex, "eps_1": _complex, "Omega": _float}
_RUN_KEYS = {
    "run.mode": ("mode", str),
    "run.t_end": ("t_end", _float),
    "run.dt": ("dt", _opt_float),
    "run.t_settle": ("t_settle", _float),
    "run.record_every": ("record_every", int),
    "run.workers": ("workers", int),
    "run.a2c_sign": ("a2c_sign", str),
    "sweep.axis": ("sweep_axis", _opt_str),
    "sweep.range": ("sweep_range", _opt_range),
    "sweep.log": ("log_axis", _bool),
    "sweep.ratio": ("sideband_ratio", _float),
    "sweep.inner_range": ("inner_range", SweepRange.parse),
    "sweep.kappas": ("kappas", _floats),
    "wigner.n": ("wigner_n", int),
    "wigner.extent": ("wigner_extent", _float),
    "spectrum.range": ("spectrum_range", SweepRange.parse),
    "spectrum.epsrel": ("quad_epsrel", _float),
}


def parse_lines(text: str) -> dict:
    """Flat ``{key: raw value}`` mapping; later keys override earlier ones."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidConfig(f"line {lineno}: expected key = value, got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise InvalidConfig(f"line {lineno}: empty key")
        out[key] = value
    return out


def apply_overrides(cfg: RunConfig, flat: dict) -> RunConfig:
    params, floquet, drive, run = {}, {}, {}, {}
    try:
        for key, value in flat.items():
            section, _, name = key.partition(".")
            if section == "params" and name in _PARAM_KEYS:
                params[name] = _PARAM_KEYS[name](value)
            elif section == "floquet" and name in _FLOQUET_KEYS:
                floquet[name] = _FLOQUET_KEYS[name](value)
            elif section == "drive" and name in _DRIVE_KEYS:
                drive[name] = _DRIVE_KEYS[name](value)
            elif key in _RUN_KEYS:
                attr, parser = _RUN_KEYS[key]
                run[attr] = parser(value)
            else:
                raise InvalidConfig(f"unknown config key {key!r}")
        new_drive = cfg.drive
        if drive:
            new_drive = replace(cfg.drive or DriveModulation(), **drive)
        return replace(
            cfg,
            params=replace(cfg.params, **params),
            floquet=replace(cfg.floquet, **floquet),
            drive=new_drive,
            **run,
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise InvalidConfig(str(exc)) from exc


def parse_config(text: str, base: RunConfig | None = None) -> RunConfig:
    return apply_overrides(base or RunConfig(), parse_lines(text))


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InvalidConfig(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)


def to_flat(cfg: RunConfig) -> dict:
    flat = {}
    for f in fields(SystemParams):
        flat[f"params.{f.name}"] = _fmt(getattr(cfg.params, f.name))
    for f in fields(FloquetAmplitudes):
        flat[f"floquet.{f.name}"] = _fmt(getattr(cfg.floquet, f.name))
    if cfg.drive is not None:
        for f in fields(DriveModulation):
            flat[f"drive.{f.name}"] = _fmt(getattr(cfg.drive, f.name))
    for key, (attr, _) in _RUN_KEYS.items():
        value = getattr(cfg, attr)
        if attr == "kappas":
            flat[key] = ",".join(_fmt(float(k)) for k in value)
        else:
            flat[key] = _fmt(value)
    return flat


def serialize_config(cfg: RunConfig) -> str:
    return "".join(f"{k} = {v}\n" for k, v in to_flat(cfg).items())
