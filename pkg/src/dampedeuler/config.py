"""Flat key = value run configuration (INI sections), validation, and the
construction of solver objects from it.

A scenario preset, when named, fills defaults first; explicit keys always
override.  Validation enforces the domain sizing rule

    x_max >= max(x0, 0) + 4 c1 t_max + support radius

(and its mirror on x_min), which makes the constant-state boundary exact
for compactly supported data under the regime bound c <= 4 c1.
"""

from __future__ import annotations

import configparser
import io
import math
from dataclasses import dataclass
from typing import Optional

from .damping import DampingSpec
from .errors import ConfigError
from .gas import GasLaw
from .presets import get_preset
from .profiles import Profile
from .solver import Grid1D, InitialData, Monitors

DOMAIN_PAD = 2.0  # clearance beyond the sizing rule, in background units

# (section, key, attribute, type) in emission order
_SCHEMA = (
    ("run", "scenario", "scenario", str),
    ("gas", "gamma", "gamma", float),
    ("gas", "u_floor", "u_floor", float),
    ("initial", "phi", "phi", str),
    ("initial", "phi_center", "phi_center", float),
    ("initial", "psi", "psi", str),
    ("initial", "psi_center", "psi_center", float),
    ("initial", "epsilon", "epsilon", float),
    ("initial", "x0", "x0", float),
    ("initial", "delta0", "delta0", float),
    ("initial", "k_report", "k_report", float),
    ("damping", "family", "damping_family", str),
    ("damping", "mu", "damping_mu", float),
    ("damping", "lambda1", "damping_lambda1", float),
    ("damping", "lambda2", "damping_lambda2", float),
    ("grid", "x_min", "x_min", float),
    ("grid", "x_max", "x_max", float),
    ("grid", "nx", "nx", int),
    ("grid", "dx", "dx", float),
    ("solver", "cfl", "cfl", float),
    ("solver", "g_stop", "g_stop", float),
    ("solver", "growth_cap", "growth_cap", float),
    ("solver", "t_max", "t_max", float),
    ("solver", "max_steps", "max_steps", int),
    ("solver", "track_phi", "track_phi", bool),
    ("solver", "keep_history", "keep_history", bool),
    ("solver", "history_stride", "history_stride", int),
    ("sweep", "epsilons", "epsilons", "floats"),
    ("sweep", "workers", "workers", int),
    ("output", "dir", "out_dir", str),
    ("output", "precision", "precision", int),
)


@dataclass(frozen=True)
class RunConfig:
    scenario: Optional[str] = None
    gamma: float = 2.0
    u_floor: float = 1e-6
    phi: str = "zero"
    phi_center: float = 0.0
    psi: str = "odd_gaussian"
    psi_center: float = 0.0
    epsilon: float = 0.1
    x0: float = 0.0
    delta0: float = 0.5
    k_report: Optional[float] = None
    damping_family: str = "zero"
    damping_mu: float = 1.0
    damping_lambda1: float = 0.0
    damping_lambda2: float = 0.0
    x_min: Optional[float] = None
    x_max: Optional[float] = None
    nx: Optional[int] = None
    dx: Optional[float] = None
    cfl: float = 0.9
    g_stop: float = 1e4
    growth_cap: float = 12.0
    t_max: float = 10.0
    max_steps: int = 10_000_000
    track_phi: bool = True
    keep_history: bool = False
    history_stride: int = 1
    epsilons: tuple = ()
    workers: Optional[int] = None
    out_dir: str = "out"
    precision: int = 12


def _preset_overrides(name: str) -> dict:
    p = get_preset(name)
    return {
        "damping_family": p.family,
        "damping_mu": p.mu,
        "damping_lambda1": p.lambda1,
        "damping_lambda2": p.lambda2,
        "dx": p.dx,
        "cfl": p.cfl,
        "growth_cap": p.growth_cap,
        "track_phi": p.track_phi,
        "epsilons": tuple(p.default_epsilons),
    }


def config_for_scenario(name: str, **overrides) -> RunConfig:
    """Preset defaults (including a t_max sized for the preset epsilon),
    then explicit overrides."""
    p = get_preset(name)
    values = {"scenario": name}
    values.update(_preset_overrides(name))
    eps = float(overrides.get("epsilon", RunConfig.epsilon))
    values["t_max"] = p.t_max_for(eps)
    values.update(overrides)
    return validate_config(RunConfig(**values))


def _parse_value(key: str, raw: str, typ):
    raw = raw.strip()
    try:
        if typ is float:
            return float(raw)
        if typ is int:
            return int(raw)
        if typ is bool:
            if raw.lower() in ("true", "1", "yes", "on"):
                return True
            if raw.lower() in ("false", "0", "no", "off"):
                return False
            raise ValueError(raw)
        if typ == "floats":
            return tuple(float(tok) for tok in raw.split(",") if tok.strip())
        return raw
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {raw!r}") from None


def parse_config(text: str) -> RunConfig:
    """Parse and validate the flat sectioned format."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config parse error: {exc}") from None

    known = {(sec, key): (attr, typ) for sec, key, attr, typ in _SCHEMA}
    for sec in cp.sections():
        for key in cp[sec]:
            if (sec, key) not in known:
                raise ConfigError(f"unknown config key {sec}.{key}")

    values = {}
    scenario = cp.get("run", "scenario", fallback=None)
    if scenario:
        values["scenario"] = scenario
        values.update(_preset_overrides(scenario))
    for sec, key, attr, typ in _SCHEMA:
        if attr == "scenario":
            continue
        if cp.has_option(sec, key):
            values[attr] = _parse_value(f"{sec}.{key}", cp.get(sec, key), typ)
    if scenario and "t_max" not in values:
        eps = values.get("epsilon", RunConfig.epsilon)
        values["t_max"] = get_preset(scenario).t_max_for(float(eps))
    return validate_config(RunConfig(**values))


def emit_config(config: RunConfig) -> str:
    """Deterministic text form; parse(emit(config)) == config."""
    cp = configparser.ConfigParser()
    for sec, key, attr, typ in _SCHEMA:
        val = getattr(config, attr)
        if val is None:
            continue
        if typ == "floats":
            if not val:
                continue
            rendered = ",".join(repr(float(v)) for v in val)
        elif typ is float:
            rendered = repr(float(val))
        else:
            rendered = str(val)
        if not cp.has_section(sec):
            cp.add_section(sec)
        cp.set(sec, key, rendered)
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def validate_config(config: RunConfig) -> RunConfig:
    if not config.gamma > 1.0:
        raise ConfigError("gas.gamma must exceed 1")
    if config.u_floor <= 0.0:
        raise ConfigError("gas.u_floor must be positive")
    if config.epsilon < 0.0:
        raise ConfigError("initial.epsilon must be non-negative")
    if not 0.0 < config.delta0:
        raise ConfigError("initial.delta0 must be positive")
    if config.nx is not None and config.nx < 3:
        raise ConfigError("grid.nx must be at least 3")
    if config.dx is not None and config.dx <= 0.0:
        raise ConfigError("grid.dx must be positive")
    if not 0.0 < config.cfl <= 1.0:
        raise ConfigError("solver.cfl must lie in (0, 1]")
    if config.g_stop <= 0.0:
        raise ConfigError("solver.g_stop must be positive")
    if config.t_max <= 0.0:
        raise ConfigError("solver.t_max must be positive")
    if config.history_stride < 1:
        raise ConfigError("solver.history_stride must be at least 1")
    if config.precision < 1:
        raise ConfigError("output.precision must be at least 1")
    if config.scenario is not None:
        get_preset(config.scenario)
    Profile(config.phi)
    Profile(config.psi)
    _damping_from(config)  # family/parameter validation
    # the sizing rule needs the resolved grid; only checkable when explicit
    if config.x_min is not None and config.x_max is not None:
        lo_req, hi_req = domain_requirement(config)
        if config.x_max < hi_req:
            raise ConfigError(
                f"grid.x_max = {config.x_max:g} violates the sizing rule "
                f"x_max >= x0 + 4 c1 t_max + support = {hi_req:g}")
        if config.x_min > lo_req:
            raise ConfigError(
                f"grid.x_min = {config.x_min:g} violates the sizing rule "
                f"x_min <= {lo_req:g}")
    return config


def _damping_from(config: RunConfig) -> DampingSpec:
    fam = config.damping_family
    if fam == "zero":
        return DampingSpec.zero()
    if fam == "time_power":
        return DampingSpec.time_power(config.damping_mu, config.damping_lambda1)
    if fam == "space_power":
        return DampingSpec.space_power(config.damping_lambda2)
    if fam == "separated_sum":
        return DampingSpec.separated_sum(config.damping_lambda1,
                                         config.damping_lambda2)
    if fam == "separated_product":
        return DampingSpec.separated_product(config.damping_lambda1,
                                             config.damping_lambda2)
    raise ConfigError(f"unknown damping.family {fam!r}")


def _initial_from(config: RunConfig) -> InitialData:
    return InitialData(
        phi=Profile(config.phi, config.phi_center),
        psi=Profile(config.psi, config.psi_center),
        epsilon=config.epsilon,
        x0=config.x0,
        delta0=config.delta0,
        k_required=config.k_report,
    )


def domain_requirement(config: RunConfig):
    """(x_min required, x_max required) from the sizing rule."""
    data = _initial_from(config)
    reach = 4.0 * config.t_max + data.support_radius
    return (min(config.x0, 0.0) - reach, max(config.x0, 0.0) + reach)


@dataclass
class Setup:
    """Solver-ready objects resolved from a RunConfig."""

    config: RunConfig
    law: GasLaw
    grid: Grid1D
    data: InitialData
    spec: DampingSpec
    monitors: Monitors


def build_setup(config: RunConfig) -> Setup:
    config = validate_config(config)
    law = GasLaw(gamma=config.gamma, u_floor=config.u_floor)
    data = _initial_from(config)
    spec = _damping_from(config)
    lo_req, hi_req = domain_requirement(config)
    x_min = config.x_min if config.x_min is not None else lo_req - DOMAIN_PAD
    x_max = config.x_max if config.x_max is not None else hi_req + DOMAIN_PAD
    if config.nx is not None:
        nx = config.nx
    else:
        dx = config.dx if config.dx is not None else 0.02
        nx = int(math.ceil((x_max - x_min) / dx)) + 1
    grid = Grid1D(x_min=x_min, x_max=x_max, nx=nx)
    monitors = Monitors(g_stop=config.g_stop, growth_cap=config.growth_cap,
                        max_steps=config.max_steps)
    return Setup(config=config, law=law, grid=grid, data=data, spec=spec,
                 monitors=monitors)
