"""Run configuration: a flat INI file mapped onto one frozen dataclass.

Schema (all sections optional; values shown are the defaults):

    [rotation]
    phi = golden            ; "golden", "liouville", or a decimal in (0,1)
    cf = 1 1 1 1            ; optional continued-fraction terms, overrides phi

    [family]
    l = 4
    a = 0.1                 ; coefficient of z^l in q1
    b = 0.1                 ; coefficient of w^l in q2

    [basin]
    r = auto                ; "auto" (search) or a positive decimal
    theta = 0.4
    beta = 0.3
    r_hi = 0.5              ; upper end of the radius search

    [run]
    seed = 0
    tol = 1e-8
    n = 100000
    out = .
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from . import rotation
from .errors import ConfigError


@dataclass(frozen=True)
class RunConfig:
    rot: rotation.RotationNumber = field(default_factory=rotation.golden_mean)
    l: int = 4
    a: complex = 0.1
    b: complex = 0.1
    r: float | None = None  # None requests the automatic radius search
    theta: float = 0.4
    beta: float = 0.3
    r_hi: float = 0.5
    seed: int = 0
    tol: float = 1e-8
    n: int = 10**5
    out: Path = Path(".")

    def __post_init__(self) -> None:
        if self.l < 4:
            raise ConfigError(f"l must be >= 4, got {self.l}")
        if not 0 < self.theta < 1.5707963267948966:
            raise ConfigError(f"theta must lie in (0, pi/2), got {self.theta}")
        if not 0 < self.beta < 0.5:
            raise ConfigError(f"beta must lie in (0, 1/2), got {self.beta}")
        if self.r is not None and not self.r > 0:
            raise ConfigError(f"r must be positive or auto, got {self.r}")
        if not self.r_hi > 0:
            raise ConfigError(f"r_hi must be > 0, got {self.r_hi}")
        if not self.tol > 0:
            raise ConfigError(f"tol must be > 0, got {self.tol}")
        if self.seed < 0:
            raise ConfigError(f"seed must be >= 0, got {self.seed}")
        if self.n < 1:
            raise ConfigError(f"n must be >= 1, got {self.n}")

    def describe(self) -> dict:
        return {
            "phi": self.rot.phi,
            "l": self.l,
            "a": [complex(self.a).real, complex(self.a).imag],
            "b": [complex(self.b).real, complex(self.b).imag],
            "r": self.r,
            "theta": self.theta,
            "beta": self.beta,
            "r_hi": self.r_hi,
            "seed": self.seed,
            "tol": self.tol,
            "n": self.n,
        }


def _parse_rotation(section) -> rotation.RotationNumber:
    cf = section.get("cf", None)
    if cf is not None:
        try:
            terms = [int(t) for t in cf.replace(",", " ").split()]
        except ValueError as exc:
            raise ConfigError(f"bad cf terms: {cf!r}") from exc
        return rotation.from_cf(terms)
    phi = section.get("phi", None)
    if phi is None:
        raise ConfigError("[rotation] needs phi or cf")
    phi = phi.strip().lower()
    if phi == "golden":
        return rotation.golden_mean()
    if phi == "liouville":
        return rotation.liouville_like()
    try:
        return rotation.RotationNumber(float(phi))
    except ValueError as exc:
        raise ConfigError(f"bad phi: {phi!r}") from exc


def load_config(path) -> RunConfig:
    """Parse an INI file into a RunConfig; all validation errors are ConfigError."""
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path}")
    kwargs = {}
    try:
        if parser.has_section("rotation"):
            kwargs["rot"] = _parse_rotation(parser["rotation"])
        if parser.has_section("family"):
            sec = parser["family"]
            if "l" in sec:
                kwargs["l"] = sec.getint("l")
            if "a" in sec:
                kwargs["a"] = complex(sec.get("a"))
            if "b" in sec:
                kwargs["b"] = complex(sec.get("b"))
        if parser.has_section("basin"):
            sec = parser["basin"]
            if "r" in sec:
                raw = sec.get("r").strip().lower()
                kwargs["r"] = None if raw == "auto" else float(raw)
            for key in ("theta", "beta", "r_hi"):
                if key in sec:
                    kwargs[key] = sec.getfloat(key)
        if parser.has_section("run"):
            sec = parser["run"]
            if "seed" in sec:
                kwargs["seed"] = sec.getint("seed")
            if "tol" in sec:
                kwargs["tol"] = sec.getfloat("tol")
            if "n" in sec:
                kwargs["n"] = sec.getint("n")
            if "out" in sec:
                kwargs["out"] = Path(sec.get("out"))
    except (ValueError, configparser.Error) as exc:
        raise ConfigError(f"invalid config value: {exc}") from exc
    return RunConfig(**kwargs)
