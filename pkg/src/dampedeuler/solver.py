"""Upwind solver for the Riemann-invariant form of the damped p-system.

The invariants obey

    r_t - c r_x = -(a/2)(r + s),      s_t + c s_x = -(a/2)(r + s)

with c = c(u) frozen at each node per step.  r is advected leftward
(forward spatial difference), s rightward (backward difference); the
damping source is integrated semi-implicitly by solving the 2x2 linear
system exactly, which is unconditionally stable for any a >= 0.  Boundary
nodes hold the constant background state, exact for compactly supported
data on a domain sized by x_max >= x0 + 4 c1 t_budget + support radius.

Time step: dt = cfl * dx / max c, additionally capped by 0.5 / max|a|.

Stopping monitors: gradient blow-up (max(|r_x|, |s_x|) >= g_eff), vacuum
(u beyond the floor or the invariant bracket non-positive), instability
(non-finite fields), horizon (t_stop or step budget).  g_eff is the lesser
of the absolute threshold g_stop and growth_cap times the initial gradient
sup: on a fixed grid the representable gradient saturates near
osc(s)/dx, so the relative cap keeps the recorded series in the regime
where 1/g is still an honest Riccati reciprocal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels
from .damping import DampingSpec
from .errors import DomainError, InstabilityError, VacuumError
from .gas import GasLaw, c_from_invariants, invariants_from_uv, u_from_invariants
from .profiles import Profile

C1 = 1.0  # background sound speed c(1) for the normalized pressure law
DOMAIN_SPEED_FACTOR = 4.0  # regime bound c <= 4 c1 used for domain sizing


@dataclass
class Grid1D:
    """Uniform node-centered grid on [x_min, x_max]."""

    x_min: float
    x_max: float
    nx: int
    x: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.nx < 3:
            raise DomainError(f"nx must be at least 3, got {self.nx}")
        if not self.x_min < self.x_max:
            raise DomainError("x_min must be smaller than x_max")
        self.x = np.linspace(self.x_min, self.x_max, self.nx)

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.nx - 1)


@dataclass(frozen=True)
class InitialData:
    """Perturbation profiles: u(0,x) = 1 + eps*phi(x), v(0,x) = eps*psi(x)."""

    phi: Profile
    psi: Profile
    epsilon: float
    x0: float = 0.0
    delta0: float = 0.5
    k_required: Optional[float] = None

    def __post_init__(self):
        if self.epsilon < 0.0:
            raise DomainError("epsilon must be non-negative")
        if not 0.0 < self.delta0:
            raise DomainError("delta0 must be positive")

    def u0(self, x):
        return 1.0 + self.epsilon * self.phi(x)

    def v0(self, x):
        return self.epsilon * self.psi(x)

    @property
    def support_radius(self) -> float:
        return max(self.phi.support_radius, self.psi.support_radius)

    def steepness_report(self) -> dict:
        """psi_x at x0 versus the configured steepness constant (reported,
        never enforced)."""
        slope = float(self.psi.deriv(self.x0))
        rep = {"x0": self.x0, "psi_x_at_x0": slope,
               "k_required": self.k_required}
        if self.k_required is not None:
            rep["satisfied"] = bool(slope <= -self.k_required)
        return rep


def _q_exponent(law: GasLaw):
    """(q, q_int) with c = base^q; q_int > 0 enables the integer fast path."""
    q = (law.gamma + 1.0) / (law.gamma - 1.0)
    qi = int(round(q))
    if abs(q - qi) < 1e-14 and 0 < qi <= 16:
        return q, qi
    return q, 0


@dataclass
class FieldState:
    """One time level of (r, s) with derived caches."""

    grid: Grid1D
    law: GasLaw
    t: float
    r: np.ndarray
    s: np.ndarray
    u: np.ndarray = field(init=False, repr=False)
    v: np.ndarray = field(init=False, repr=False)
    c: np.ndarray = field(init=False, repr=False)
    rx: np.ndarray = field(init=False, repr=False)
    sx: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.u = u_from_invariants(self.law, self.r, self.s)
        self.v = 0.5 * (self.r + self.s)
        self.c = c_from_invariants(self.law, self.r, self.s)
        dx = self.grid.dx
        self.rx = np.gradient(self.r, dx, edge_order=1)
        self.sx = np.gradient(self.s, dx, edge_order=1)

    @property
    def ux(self):
        return (self.rx - self.sx) / (2.0 * self.c)

    @property
    def vx(self):
        return 0.5 * (self.rx + self.sx)

    def gradient_sup(self) -> float:
        return max(float(np.max(np.abs(self.rx))), float(np.max(np.abs(self.sx))))


def init(grid: Grid1D, law: GasLaw, data: InitialData) -> FieldState:
    """Initial field from the perturbation profiles; enforces u(0,.) >= delta0."""
    u0 = np.asarray(data.u0(grid.x), dtype=float)
    v0 = np.asarray(data.v0(grid.x), dtype=float)
    if np.min(u0) < data.delta0:
        raise VacuumError(
            f"initial specific volume dips below delta0 = {data.delta0:g}")
    r, s = invariants_from_uv(law, u0, v0)
    return FieldState(grid=grid, law=law, t=0.0, r=r, s=s)


def _damping_mode(spec: DampingSpec, x: np.ndarray):
    """(mode flag, cached space-factor array) for the step kernel."""
    if spec.family == "zero":
        return _kernels.A_ZERO, np.zeros(1)
    if spec.family == "time_power":
        return _kernels.A_TIME, np.zeros(1)
    a2x = np.asarray(spec.space_factor(x), dtype=float)
    if spec.family == "space_power":
        return _kernels.A_SPACE, a2x
    if spec.family == "separated_sum":
        return _kernels.A_SUM, a2x
    return _kernels.A_PRODUCT, a2x


def _pick_dt(cfl, dx, c_max, a_max, t, t_stop):
    dt = cfl * dx / c_max
    if a_max > 0.0:
        dt = min(dt, 0.5 / a_max)
    return min(dt, t_stop - t)


def step(state: FieldState, law: GasLaw, spec: DampingSpec,
         cfl: float) -> FieldState:
    """Advance one step and return the new level as a full FieldState."""
    if not 0.0 < cfl <= 1.0:
        raise DomainError("cfl must lie in (0, 1]")
    grid, dx = state.grid, state.grid.dx
    q, qi = _q_exponent(law)
    mode, a2x = _damping_mode(spec, grid.x)
    c_max = float(np.max(state.c))
    a_max = spec.max_abs_a(state.t, max(abs(grid.x_min), abs(grid.x_max)))
    dt = _pick_dt(cfl, dx, c_max, a_max, state.t, np.inf)
    rn = np.empty_like(state.r)
    sn = np.empty_like(state.s)
    cn = np.empty_like(state.c)
    a_scalar = float(spec.time_factor(state.t + 0.5 * dt))
    base_min, base_max, *_rest, bad = _kernels.step_kernel(
        state.r, state.s, state.c, rn, sn, cn, mode, a_scalar, a2x,
        dt, dx, 1.0 / law.eta_coef, q, qi)
    if bad or not np.isfinite(base_min) or not np.isfinite(base_max):
        raise InstabilityError(f"non-finite field after step at t={state.t:g}")
    _check_vacuum(law, base_min, base_max)
    return FieldState(grid=grid, law=law, t=state.t + dt, r=rn, s=sn)


def _check_vacuum(law: GasLaw, base_min: float, base_max: float):
    if base_min <= 0.0:
        raise VacuumError("invariant bracket reached zero: u undefined")
    u_min = base_max ** (-2.0 / (law.gamma - 1.0))
    if u_min < law.u_floor:
        raise VacuumError(f"specific volume fell below u_floor = {law.u_floor:g}")


@dataclass
class Monitors:
    """Stopping thresholds for run_until."""

    g_stop: float = 1e4
    growth_cap: float = 12.0
    max_steps: int = 10_000_000

    def effective_g(self, g0: float) -> float:
        if g0 > 0.0 and self.growth_cap > 0.0:
            return min(self.g_stop, self.growth_cap * g0)
        return self.g_stop


@dataclass
class TimeSeries:
    """Per-level diagnostics recorded by run_until."""

    t: np.ndarray
    min_u: np.ndarray
    max_u: np.ndarray
    max_abs_rx: np.ndarray
    max_abs_sx: np.ndarray
    max_abs_ux: np.ndarray
    max_abs_vx: np.ndarray
    phi_region: np.ndarray

    COLUMNS = ("t", "min_u", "max_u", "max_abs_rx", "max_abs_sx",
               "max_abs_ux", "max_abs_vx", "phi_region")

    def __len__(self):
        return self.t.size

    @property
    def gradient_sup(self) -> np.ndarray:
        return np.maximum(self.max_abs_rx, self.max_abs_sx)

    def rows(self):
        cols = [getattr(self, name) for name in self.COLUMNS]
        return zip(*cols)


class SolverHistory:
    """Retained (r, s) levels with lazily derived per-level caches."""

    def __init__(self, grid: Grid1D, law: GasLaw, stride: int = 1):
        self.grid = grid
        self.law = law
        self.stride = max(1, int(stride))
        self.times: list[float] = []
        self._rs: list[tuple[np.ndarray, np.ndarray]] = []
        self._c_cache: dict[int, np.ndarray] = {}

    def __len__(self):
        return len(self.times)

    def append(self, t: float, r: np.ndarray, s: np.ndarray):
        self.times.append(float(t))
        self._rs.append((r.copy(), s.copy()))

    def replace_last(self, t: float, r: np.ndarray, s: np.ndarray):
        self.times[-1] = float(t)
        self._rs[-1] = (r.copy(), s.copy())
        self._c_cache.pop(len(self.times) - 1, None)

    def level_rs(self, i: int):
        return self._rs[i]

    def level_c(self, i: int) -> np.ndarray:
        c = self._c_cache.get(i)
        if c is None:
            r, s = self._rs[i]
            c = np.asarray(c_from_invariants(self.law, r, s))
            self._c_cache[i] = c
        return c

    def level_state(self, i: int) -> FieldState:
        r, s = self._rs[i]
        return FieldState(grid=self.grid, law=self.law, t=self.times[i],
                          r=r.copy(), s=s.copy())

    @property
    def time_array(self) -> np.ndarray:
        return np.asarray(self.times)


@dataclass
class RunResult:
    state: FieldState
    series: TimeSeries
    cause: str  # gradient | vacuum | horizon | instability
    g0: float
    g_eff: float
    history: Optional[SolverHistory] = None
    regime_exit_t: Optional[float] = None
    steps: int = 0


def interp_at(x: np.ndarray, f: np.ndarray, xi: float) -> float:
    """Linear interpolation of nodal values at a single point (O(log n))."""
    if xi <= x[0]:
        return float(f[0])
    if xi >= x[-1]:
        return float(f[-1])
    j = int(np.searchsorted(x, xi)) - 1
    w = (xi - x[j]) / (x[j + 1] - x[j])
    return float(f[j] * (1.0 - w) + f[j + 1] * w)


def run_until(state: FieldState, law: GasLaw, spec: DampingSpec, cfl: float,
              t_stop: float, monitors: Monitors | None = None,
              hooks: tuple = (), keep_history: bool = False,
              history_stride: int = 1) -> RunResult:
    """March the field until t_stop, a monitor fires, or the budget runs out.

    Hooks observe each accepted level and may contribute extra diagnostics
    (the phi_region column); see characteristics.ForwardBoundaries and
    lifespan.PhiTracker.
    """
    if not 0.0 < cfl <= 1.0:
        raise DomainError("cfl must lie in (0, 1]")
    if t_stop <= state.t:
        raise DomainError("t_stop must exceed the current time")
    monitors = monitors or Monitors()
    grid, dx = state.grid, state.grid.dx
    q, qi = _q_exponent(law)
    mode, a2x = _damping_mode(spec, grid.x)
    x_abs = max(abs(grid.x_min), abs(grid.x_max))
    inv_eta = 1.0 / law.eta_coef
    u_exp = -2.0 / (law.gamma - 1.0)

    r = state.r.copy()
    s = state.s.copy()
    c = np.empty_like(r)
    base_min, base_max, bad = _kernels.derive_kernel(r, s, c, inv_eta, q, qi)
    if bad:
        raise InstabilityError("non-finite initial data")
    _check_vacuum(law, base_min, base_max)

    m_rx0, m_sx0 = _kernels.gradient_maxima(r, s, dx)
    g0 = max(m_rx0, m_sx0)
    g_eff = monitors.effective_g(g0)

    cols = {name: [] for name in TimeSeries.COLUMNS}

    def record(t, bmin, bmax, mrx, msx, mux, mvx, phi):
        cols["t"].append(t)
        cols["min_u"].append(bmax ** u_exp)
        cols["max_u"].append(bmin ** u_exp)
        cols["max_abs_rx"].append(mrx)
        cols["max_abs_sx"].append(msx)
        cols["max_abs_ux"].append(mux)
        cols["max_abs_vx"].append(mvx)
        cols["phi_region"].append(phi)

    state0 = FieldState(grid=grid, law=law, t=state.t, r=r.copy(), s=s.copy())
    extras0: dict = {}
    for hook in hooks:
        out = hook.on_start(state.t, grid.x, r, s, c)
        if out:
            extras0.update(out)
    record(state.t, base_min, base_max, m_rx0, m_sx0,
           float(np.max(np.abs(state0.ux))), float(np.max(np.abs(state0.vx))),
           extras0.get("phi_region", np.nan))

    history = SolverHistory(grid, law, history_stride) if keep_history else None
    if history is not None:
        history.append(state.t, r, s)

    rn = np.empty_like(r)
    sn = np.empty_like(s)
    cn = np.empty_like(c)
    t = state.t
    c_max = base_max ** (qi if qi else q) if base_max > 0 else np.nan
    cause = "horizon"
    regime_exit_t = None
    steps = 0
    last_good = (r, s, t)

    while t < t_stop - 1e-14:
        if steps >= monitors.max_steps:
            cause = "horizon"
            break
        a_max = spec.max_abs_a(t, x_abs)
        dt = _pick_dt(cfl, dx, c_max, a_max, t, t_stop)
        a_scalar = float(spec.time_factor(t + 0.5 * dt))
        base_min, base_max, m_rx, m_sx, m_ux, m_vx, bad = _kernels.step_kernel(
            r, s, c, rn, sn, cn, mode, a_scalar, a2x, dt, dx, inv_eta, q, qi)
        steps += 1
        if bad or not (np.isfinite(m_rx) and np.isfinite(m_sx)):
            cause = "instability"
            break
        t_new = t + dt
        phi_val = np.nan
        for hook in hooks:
            out = hook.on_step(t_new, dt, grid.x, rn, sn, cn, c)
            if out and "phi_region" in out:
                phi_val = out["phi_region"]
        r, rn = rn, r
        s, sn = sn, s
        c, cn = cn, c
        t = t_new
        last_good = (r, s, t)
        record(t, base_min, base_max, m_rx, m_sx, m_ux, m_vx, phi_val)
        if history is not None and (steps % history.stride == 0):
            history.append(t, r, s)

        if base_min <= 0.0 or base_max ** u_exp < law.u_floor:
            cause = "vacuum"
            break
        c_max = base_max ** (qi if qi else q)
        c_min = base_min ** (qi if qi else q)
        if regime_exit_t is None and (c_min < 0.25 * C1 or c_max > 4.0 * C1):
            regime_exit_t = t
        if max(m_rx, m_sx) >= g_eff:
            cause = "gradient"
            break
    else:
        cause = "horizon"

    if history is not None and history.times[-1] != last_good[2]:
        history.append(last_good[2], last_good[0], last_good[1])

    series = TimeSeries(**{k: np.asarray(v, dtype=float) for k, v in cols.items()})
    final = FieldState(grid=grid, law=law, t=last_good[2],
                       r=last_good[0].copy(), s=last_good[1].copy())
    return RunResult(state=final, series=series, cause=cause, g0=g0,
                     g_eff=g_eff, history=history,
                     regime_exit_t=regime_exit_t, steps=steps)


@dataclass
class RegionSup:
    """Sup norms over a region; all zero with empty=True when no node lies
    inside."""

    sup_r: float
    sup_s: float
    sup_rx: float
    sup_sx: float
    sup_ux: float
    sup_vx: float
    empty: bool = False

    def astuple(self):
        return (self.sup_r, self.sup_s, self.sup_rx, self.sup_sx,
                self.sup_ux, self.sup_vx)


def sup_norms_on_region(state: FieldState, region) -> RegionSup:
    """Maxima of |r|, |s|, |r_x|, |s_x|, |u_x|, |v_x| over grid nodes inside
    `region` (anything with mask(t, x) -> bool array)."""
    mask = np.asarray(region.mask(state.t, state.grid.x), dtype=bool)
    if not mask.any():
        return RegionSup(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, empty=True)

    def m(arr):
        return float(np.max(np.abs(arr[mask])))

    return RegionSup(m(state.r), m(state.s), m(state.rx), m(state.sx),
                     m(state.ux), m(state.vx))
