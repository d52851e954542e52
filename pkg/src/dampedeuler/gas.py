"""Thermodynamic closure for the barotropic p-system.

Pressure law p(u) = u^(-gamma)/gamma with gamma > 1, u the specific volume.
Derived quantities:

    c(u)     = sqrt(-p'(u)) = u^(-(gamma+1)/2)          (Lagrangian sound speed)
    eta(u)   = integral_u^inf c = (2/(gamma-1)) u^(-(gamma-1)/2)
    theta(u) = (4/(3-gamma)) (u^((3-gamma)/4) - 1),  log u when gamma = 3

Riemann invariants are normalized so that r = s = 0 at the background
state (u, v) = (1, 0):

    r = v - eta(u) + 2/(gamma-1)
    s = v + eta(u) - 2/(gamma-1)

All functions accept scalars or numpy arrays and close over gamma through
a GasLaw instance, so a call site can never mix exponents.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, VacuumError

DEFAULT_U_FLOOR = 1e-6


@dataclass(frozen=True)
class GasLaw:
    """Adiabatic exponent and the vacuum guard threshold."""

    gamma: float
    u_floor: float = DEFAULT_U_FLOOR

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise DomainError(f"gamma must exceed 1, got {self.gamma}")
        if not self.u_floor > 0.0:
            raise DomainError(f"u_floor must be positive, got {self.u_floor}")

    # Exponent shorthands reused all over the numerics.
    @property
    def eta_coef(self) -> float:
        return 2.0 / (self.gamma - 1.0)

    @property
    def c_exponent(self) -> float:
        return -(self.gamma + 1.0) / 2.0

    def _check_u(self, u):
        if np.any(np.asarray(u) <= 0.0):
            raise DomainError("specific volume u must be positive")
        if np.any(np.asarray(u) < self.u_floor):
            raise VacuumError(
                f"specific volume below vacuum floor {self.u_floor:g}"
            )


@dataclass(frozen=True)
class GasState:
    """Pointwise (specific volume, velocity) pair."""

    u: float
    v: float

    def __post_init__(self):
        if not self.u > 0.0:
            raise DomainError(f"u must be positive, got {self.u}")


@dataclass(frozen=True)
class RiemannPair:
    """Pointwise invariants (r, s); r + s = 2v for pairs built from a state."""

    r: float
    s: float


def pressure(law: GasLaw, u):
    """p(u) = u^(-gamma)/gamma."""
    law._check_u(u)
    return u ** (-law.gamma) / law.gamma


def sound_speed(law: GasLaw, u):
    """c(u) = sqrt(-p'(u)) = u^(-(gamma+1)/2); strictly decreasing in u."""
    law._check_u(u)
    return u ** law.c_exponent


def eta(law: GasLaw, u):
    """eta(u) = integral_u^inf c(xi) dxi = (2/(gamma-1)) u^(-(gamma-1)/2)."""
    law._check_u(u)
    return law.eta_coef * u ** (-(law.gamma - 1.0) / 2.0)


def theta_gamma(law: GasLaw, u):
    """Antiderivative of sqrt(c) in u, normalized to vanish at u = 1.

    Two-branch definition: log u exactly at gamma = 3, the power form
    otherwise (the power branch is numerically stable near gamma = 3 and
    converges to log u there).
    """
    law._check_u(u)
    if law.gamma == 3.0:
        return np.log(u)
    k = 4.0 / (3.0 - law.gamma)
    return k * (u ** ((3.0 - law.gamma) / 4.0) - 1.0)


def riemann_from_state(law: GasLaw, st: GasState) -> RiemannPair:
    """Map (u, v) to the normalized invariants (r, s)."""
    e = eta(law, st.u)
    return RiemannPair(r=st.v - e + law.eta_coef, s=st.v + e - law.eta_coef)


def state_from_riemann(law: GasLaw, rp: RiemannPair) -> GasState:
    """Invert the invariant map; raises VacuumError when (s-r)/2 + 2/(gamma-1)
    is not positive (u would be undefined: the p' singularity regime)."""
    u = u_from_invariants(law, rp.r, rp.s)
    return GasState(u=float(u), v=0.5 * (rp.r + rp.s))


# Array-shaped helpers used by the solvers; same formulas as the pointwise API.

def invariants_from_uv(law: GasLaw, u, v):
    """(r, s) arrays from (u, v) arrays."""
    e = eta(law, u)
    return v - e + law.eta_coef, v + e - law.eta_coef


def eta_from_invariants(law: GasLaw, r, s):
    """eta = (s - r)/2 + 2/(gamma-1); raises VacuumError if non-positive."""
    e = 0.5 * (np.asarray(s) - np.asarray(r)) + law.eta_coef
    if np.any(e <= 0.0):
        raise VacuumError("(s - r)/2 + 2/(gamma-1) <= 0: specific volume undefined")
    return e


def u_from_invariants(law: GasLaw, r, s):
    """Specific volume from the invariants via the eta inversion."""
    e = eta_from_invariants(law, r, s)
    base = e / law.eta_coef  # = u^(-(gamma-1)/2)
    u = base ** (-2.0 / (law.gamma - 1.0))
    if np.any(np.asarray(u) < law.u_floor):
        raise VacuumError(f"specific volume below vacuum floor {law.u_floor:g}")
    return u


def c_from_invariants(law: GasLaw, r, s):
    """Sound speed from the invariants without forming u explicitly."""
    base = eta_from_invariants(law, r, s) / law.eta_coef
    return base ** ((law.gamma + 1.0) / (law.gamma - 1.0))
