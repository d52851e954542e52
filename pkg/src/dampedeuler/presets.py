"""Scenario presets: one row per studied damping regime.

Presets are data consumed by both the sweep runner and the acceptance
suite: damping family and parameters, the expected scaling model with its
exponent window, the default epsilon ladder, and the numerical knobs
(target spacing, CFL number, gradient growth cap, and a t_max sizing rule
used as the initial horizon guess; sweep workers double it when a run
expected to blow up reaches the horizon instead).

t_max rules: ("inv", A, B) -> A/eps + B;  ("inv_sq", A, B) -> A/eps^2 + B/eps;
("exp", A, B) -> A exp(B/eps);  ("const", T, 0) -> T.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import ConfigError


@dataclass(frozen=True)
class ScenarioPreset:
    name: str
    family: str
    mu: float
    lambda1: float
    lambda2: float
    expected_model: str               # power | exponential | none
    exponent_window: Optional[tuple]  # (lo, hi) for the power exponent
    default_epsilons: tuple
    t_max_rule: tuple
    dx: float
    cfl: float
    growth_cap: float
    track_phi: bool

    @property
    def expect_blowup(self) -> bool:
        return self.expected_model != "none"

    def t_max_for(self, eps: float) -> float:
        kind, a, b = self.t_max_rule
        if kind == "inv":
            return a / eps + b
        if kind == "inv_sq":
            return a / eps ** 2 + b / eps
        if kind == "exp":
            return a * math.exp(b / eps)
        return a


_LADDER = (0.2, 0.1, 0.05, 0.025)

PRESETS = {
    p.name: p for p in (
        ScenarioPreset(
            name="euler_undamped", family="zero", mu=0.0, lambda1=0.0,
            lambda2=0.0, expected_model="power",
            exponent_window=(-1.15, -0.85), default_epsilons=_LADDER,
            t_max_rule=("inv", 1.9, 2.0), dx=0.012, cfl=0.995,
            growth_cap=12.0, track_phi=True),
        ScenarioPreset(
            name="time_power_supercrit", family="time_power", mu=1.0,
            lambda1=2.0, lambda2=0.0, expected_model="power",
            exponent_window=(-1.2, -0.8), default_epsilons=_LADDER,
            t_max_rule=("inv", 3.2, 2.0), dx=0.012, cfl=0.995,
            growth_cap=12.0, track_phi=False),
        ScenarioPreset(
            name="time_critical_sub", family="time_power", mu=1.0,
            lambda1=1.0, lambda2=0.0, expected_model="power",
            exponent_window=(-2.3, -1.7), default_epsilons=_LADDER,
            t_max_rule=("inv_sq", 0.62, 2.0), dx=0.010, cfl=0.995,
            growth_cap=12.0, track_phi=False),
        ScenarioPreset(
            name="time_critical_eq", family="time_power", mu=2.0,
            lambda1=1.0, lambda2=0.0, expected_model="exponential",
            exponent_window=None, default_epsilons=(0.5, 0.4, 0.3),
            t_max_rule=("exp", 2.2, 4.0 / 3.0), dx=0.012, cfl=0.995,
            growth_cap=12.0, track_phi=False),
        ScenarioPreset(
            name="time_global", family="time_power", mu=1.0, lambda1=0.5,
            lambda2=0.0, expected_model="none", exponent_window=None,
            default_epsilons=(0.05,), t_max_rule=("const", 200.0, 0.0),
            dx=0.05, cfl=0.9, growth_cap=12.0, track_phi=False),
        ScenarioPreset(
            name="separated_sum", family="separated_sum", mu=1.0,
            lambda1=2.0, lambda2=2.0, expected_model="power",
            exponent_window=(-1.2, -0.8), default_epsilons=_LADDER,
            t_max_rule=("inv", 3.2, 2.0), dx=0.012, cfl=0.995,
            growth_cap=12.0, track_phi=True),
        ScenarioPreset(
            name="separated_product", family="separated_product", mu=1.0,
            lambda1=0.6, lambda2=0.6, expected_model="power",
            exponent_window=(-1.2, -0.8), default_epsilons=_LADDER,
            t_max_rule=("inv", 3.2, 2.0), dx=0.012, cfl=0.995,
            growth_cap=12.0, track_phi=True),
    )
}


def get_preset(name: str) -> ScenarioPreset:
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigError(
            f"unknown scenario {name!r}; available: {sorted(PRESETS)}") from None
