"""Independent verification solvers.

Two routes that share nothing with the upwind invariant solver:

* a conservative finite-volume scheme (local Lax-Friedrichs fluxes, Strang
  splitting with exact exponential integration of the -a v source) for
  cross-checking (u, v) fields at smooth times, and

* the exact simple wave: with r == 0 and a == 0, s is constant along plus
  characteristics whose speed depends on s alone,

      Lambda(s) = c(u(s)) = (1 + (gamma-1) s / 4)^((gamma+1)/(gamma-1)),

  so the gradient catastrophe happens at T* = -1 / min_x d/dx Lambda(s0(x))
  (no blow-up when that derivative is nowhere negative).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.optimize import minimize_scalar

from . import _kernels
from .damping import DampingSpec
from .errors import DomainError, InstabilityError, VacuumError
from .gas import GasLaw
from .solver import Grid1D, InitialData


@dataclass
class ConservativeState:
    grid: Grid1D
    law: GasLaw
    t: float
    u: np.ndarray
    v: np.ndarray


def lax_friedrichs_run(grid: Grid1D, law: GasLaw, spec: DampingSpec,
                       data: InitialData, t_stop: float,
                       cfl: float = 0.9) -> ConservativeState:
    """March the conservative form to t_stop (pre-blow-up usage)."""
    if not 0.0 < cfl <= 1.0:
        raise DomainError("cfl must lie in (0, 1]")
    x, dx = grid.x, grid.dx
    u = np.asarray(data.u0(x), dtype=float).copy()
    v = np.asarray(data.v0(x), dtype=float).copy()
    if np.min(u) < data.delta0:
        raise VacuumError(
            f"initial specific volume dips below delta0 = {data.delta0:g}")
    un = np.empty_like(u)
    vn = np.empty_like(v)
    x_abs = max(abs(grid.x_min), abs(grid.x_max))
    c_exp = -(law.gamma + 1.0) * 0.5
    t = 0.0
    while t < t_stop * (1.0 - 1e-15):
        alpha = u ** c_exp
        dt = cfl * dx / float(np.max(alpha))
        a_max = spec.max_abs_a(t, x_abs)
        if a_max > 0.0:
            dt = min(dt, 0.5 / a_max)
        dt = min(dt, t_stop - t)
        # Strang: half source, full transport, half source (exact exp integration)
        v = v * np.exp(-0.5 * dt * spec.eval_a(t + 0.25 * dt, x))
        _kernels.lf_step_kernel(u, v, un, vn, alpha, law.gamma, dt, dx)
        u, un = un, u
        v, vn = vn, v
        v *= np.exp(-0.5 * dt * spec.eval_a(t + 0.75 * dt, x))
        t += dt
        if not (np.isfinite(u[1:-1]).all() and np.isfinite(v[1:-1]).all()):
            raise InstabilityError(f"non-finite conservative field at t={t:g}")
        if np.min(u) < law.u_floor:
            raise VacuumError("specific volume fell below u_floor")
    return ConservativeState(grid=grid, law=law, t=t, u=u, v=v)


@dataclass
class SimpleWaveOracle:
    """Exact s-wave (r == 0, a == 0) built from an initial s-profile."""

    law: GasLaw
    s0: Callable
    s0_deriv: Callable
    x_lo: float = -10.0
    x_hi: float = 10.0

    def wave_speed(self, s):
        g = self.law.gamma
        return (1.0 + 0.25 * (g - 1.0) * np.asarray(s)) ** ((g + 1.0) / (g - 1.0))

    def wave_speed_deriv(self, s):
        g = self.law.gamma
        return (0.25 * (g + 1.0)
                * (1.0 + 0.25 * (g - 1.0) * np.asarray(s)) ** (2.0 / (g - 1.0)))

    def speed_slope(self, x):
        """d/dx Lambda(s0(x)) = Lambda'(s0) * s0'(x)."""
        return self.wave_speed_deriv(self.s0(x)) * np.asarray(self.s0_deriv(x))


def simple_wave_T_star(oracle: SimpleWaveOracle, samples: int = 4001) -> float:
    """Exact catastrophe time of the continuum simple wave: dense sampling
    of the analytic speed slope plus a bounded local refinement.  Returns
    inf when the profile produces no compression (rarefaction-only data)."""
    xs = np.linspace(oracle.x_lo, oracle.x_hi, samples)
    slopes = oracle.speed_slope(xs)
    i = int(np.argmin(slopes))
    if slopes[i] >= 0.0:
        return np.inf
    lo = xs[max(i - 1, 0)]
    hi = xs[min(i + 1, samples - 1)]
    res = minimize_scalar(lambda x: float(oracle.speed_slope(x)),
                          bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-12})
    worst = min(float(slopes[i]), float(res.fun))
    return -1.0 / worst


def riccati_closed_form(q0: float, coeff: float, t):
    """q(t) = q0 / (1 - coeff * q0 * t); raises at the pole."""
    denom = 1.0 - coeff * q0 * np.asarray(t, dtype=float)
    if np.any(np.abs(denom) < 1e-300):
        raise DomainError("closed-form Riccati evaluated at its pole")
    return (q0 / denom)[()]
