"""INI-style run configuration: parsing, validation, profile expressions.

A run is described by the sections [potential], [closures], [grid],
[initial], [run], plus one optional section per front-end scenario
([hyperbolicity], [gibbs], [fick], [reduce]).  Every key is validated with
range checks and unknown sections or keys are hard errors, so a typo cannot
silently fall back to a default.

Initial profiles and external potentials are given as expressions in x
(e.g. ``1.0 + 0.1*sin(2*pi*x)``) evaluated in a restricted numpy namespace.
"""
from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, field
from typing import Callable, Dict

import numpy as np

from .closures import ClosureParams
from .potential import SeparableAddedMass, SeparableAddedMassParams
from .solver import (ExternalPotential, Grid1D, SimulationConfig,
                     ZERO_POTENTIAL)


class ConfigError(ValueError):
    """Configuration rejected (syntax, unknown key, or range violation)."""


_EXPR_NAMES = {
    "sin": np.sin, "cos": np.cos, "tan": np.tan, "exp": np.exp,
    "log": np.log, "sqrt": np.sqrt, "tanh": np.tanh, "abs": np.abs,
    "where": np.where, "minimum": np.minimum, "maximum": np.maximum,
    "pi": np.pi, "e": np.e,
}


def profile_expression(expr: str) -> Callable[[np.ndarray], np.ndarray]:
    """Compile an expression in x into a vectorized profile function."""
    try:
        code = compile(expr, "<profile>", "eval")
    except SyntaxError as exc:
        raise ConfigError(f"bad profile expression {expr!r}: {exc}") from exc
    for name in code.co_names:
        if name not in _EXPR_NAMES and name != "x":
            raise ConfigError(
                f"profile expression {expr!r} uses unknown name {name!r}")

    def profile(x: np.ndarray) -> np.ndarray:
        env = dict(_EXPR_NAMES)
        env["x"] = x
        val = eval(code, {"__builtins__": {}}, env)
        return np.broadcast_to(np.asarray(val, dtype=float), x.shape).copy()

    return profile


_SCHEMA: Dict[str, Dict[str, str]] = {
    "potential": {"law": "separable_added_mass",
                  "gamma1": "1.6", "gamma2": "1.6", "cv1": "1.0",
                  "cv2": "1.0", "k1": "1.0", "k2": "1.0",
                  "s01": "0.0", "s02": "0.0", "a": "0.0"},
    "closures": {"k": "0.0", "kappa": "0.0"},
    "grid": {"x_lo": "0.0", "x_hi": "1.0", "n": "100", "bc": "periodic"},
    "initial": {"rho1": "1.0", "rho2": "1.0", "u1": "0.0", "u2": "0.0",
                "s1": "0.0", "s2": "0.0"},
    "run": {"cfl": "0.45", "t_end": "1.0", "report_interval": "",
            "theta0": "1.0", "omega1": "0.0", "omega2": "0.0"},
    "hyperbolicity": {"rho1_min": "0.5", "rho1_max": "1.5",
                      "rho2_min": "0.5", "rho2_max": "1.5",
                      "w_min": "0.0", "w_max": "2.0",
                      "n_rho1": "10", "n_rho2": "10", "n_w": "10",
                      "s1": "0.0", "s2": "0.0"},
    "gibbs": {"n_fields": "20", "h_values": "1e-2,5e-3,2.5e-3",
              "t_lo": "0.0", "t_hi": "1.0"},
    "fick": {"sample_times": "0.2,0.4,0.6", "theta_bound": "0.05"},
    "reduce": {"n_values": "200,400,800", "ref_factor": "8"},
}


@dataclass
class ScenarioConfig:
    """Fully validated union of all config sections (defaults applied)."""
    raw: Dict[str, Dict[str, str]] = field(default_factory=dict)

    def get(self, section: str, key: str) -> str:
        return self.raw[section][key]

    def getfloat(self, section: str, key: str) -> float:
        val = self.raw[section][key]
        try:
            return float(val)
        except ValueError as exc:
            raise ConfigError(
                f"[{section}] {key} = {val!r} is not a number") from exc

    def getint(self, section: str, key: str) -> int:
        val = self.raw[section][key]
        try:
            return int(val)
        except ValueError as exc:
            raise ConfigError(
                f"[{section}] {key} = {val!r} is not an integer") from exc

    def getfloats(self, section: str, key: str):
        return [float(v) for v in self.raw[section][key].split(",")]

    def getints(self, section: str, key: str):
        return [int(v) for v in self.raw[section][key].split(",")]


def parse_config(text: str) -> ScenarioConfig:
    """Parse and validate config text; unknown keys are hard errors."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_file(io.StringIO(text))
    except configparser.Error as exc:
        raise ConfigError(f"config syntax error: {exc}") from exc

    raw = {sec: dict(defaults) for sec, defaults in _SCHEMA.items()}
    for sec in parser.sections():
        if sec not in _SCHEMA:
            raise ConfigError(f"unknown section [{sec}]")
        for key, val in parser[sec].items():
            if key not in _SCHEMA[sec]:
                raise ConfigError(f"unknown key {key!r} in section [{sec}]")
            raw[sec][key] = val

    cfg = ScenarioConfig(raw=raw)
    _validate(cfg)
    return cfg


def _validate(cfg: ScenarioConfig) -> None:
    if cfg.get("potential", "law") != "separable_added_mass":
        raise ConfigError(
            f"unknown constitutive law {cfg.get('potential', 'law')!r}")
    for g in ("gamma1", "gamma2"):
        if cfg.getfloat("potential", g) <= 1.0:
            raise ConfigError(f"{g} must exceed 1")
    for key in ("cv1", "cv2", "k1", "k2"):
        if cfg.getfloat("potential", key) <= 0.0:
            raise ConfigError(f"{key} must be positive")
    if cfg.getfloat("potential", "a") < 0.0:
        raise ConfigError("a must be nonnegative")
    for key in ("k", "kappa"):
        if cfg.getfloat("closures", key) < 0.0:
            raise ConfigError(f"{key} must be nonnegative")
    if cfg.getint("grid", "n") < 4:
        raise ConfigError("n must be at least 4")
    if cfg.getfloat("grid", "x_hi") <= cfg.getfloat("grid", "x_lo"):
        raise ConfigError("x_hi must exceed x_lo")
    if cfg.get("grid", "bc") not in ("periodic", "transmissive"):
        raise ConfigError("bc must be periodic or transmissive")
    cflv = cfg.getfloat("run", "cfl")
    if not (0.0 < cflv <= 0.9):
        raise ConfigError("cfl must lie in (0, 0.9]")
    if cfg.getfloat("run", "t_end") < 0.0:
        raise ConfigError("t_end must be nonnegative")
    for key in ("rho1", "rho2", "u1", "u2", "s1", "s2"):
        profile_expression(cfg.get("initial", key))
    for key in ("omega1", "omega2"):
        profile_expression(cfg.get("run", key))


def build_model(cfg: ScenarioConfig) -> SeparableAddedMass:
    p = cfg.raw["potential"]
    return SeparableAddedMass(SeparableAddedMassParams(
        gamma1=float(p["gamma1"]), gamma2=float(p["gamma2"]),
        cv1=float(p["cv1"]), cv2=float(p["cv2"]),
        K1=float(p["k1"]), K2=float(p["k2"]),
        s01=float(p["s01"]), s02=float(p["s02"]), a=float(p["a"])))


def build_closures(cfg: ScenarioConfig) -> ClosureParams:
    return ClosureParams(k=cfg.getfloat("closures", "k"),
                         kappa=cfg.getfloat("closures", "kappa"))


def _external_potential(expr: str) -> ExternalPotential:
    if expr.strip() in ("0", "0.0"):
        return ZERO_POTENTIAL
    value = profile_expression(expr)
    h = 1e-6

    def grad(x: np.ndarray) -> np.ndarray:
        return (value(x + h) - value(x - h)) / (2.0 * h)

    return ExternalPotential(value=value, grad=grad)


def build_simulation(cfg: ScenarioConfig) -> SimulationConfig:
    grid = Grid1D(x_lo=cfg.getfloat("grid", "x_lo"),
                  x_hi=cfg.getfloat("grid", "x_hi"),
                  n=cfg.getint("grid", "n"),
                  bc=cfg.get("grid", "bc"))
    interval = cfg.get("run", "report_interval")
    return SimulationConfig(
        grid=grid, model=build_model(cfg), closures=build_closures(cfg),
        omega1=_external_potential(cfg.get("run", "omega1")),
        omega2=_external_potential(cfg.get("run", "omega2")),
        cfl=cfg.getfloat("run", "cfl"),
        t_end=cfg.getfloat("run", "t_end"),
        report_interval=float(interval) if interval else None,
        theta0=cfg.getfloat("run", "theta0"))


def initial_profiles(cfg: ScenarioConfig):
    return {key: profile_expression(cfg.get("initial", key))
            for key in ("rho1", "rho2", "u1", "u2", "s1", "s2")}
