"""Characteristic curves, integrating factors, regions, and the Riccati
dynamics of the invariant gradients.

Plus/minus curves solve dx/dt = +-c(u(t, x)) through the stored solver
history (Heun two-stage steps, linear interpolation in x at each level and
in t between levels).  Along a curve traced from tau = 0 the integrating
factor is

    A(tau) = exp( integral_0^tau a(s, x(s))/2 ds ),   A(0) = 1.

On a plus curve, Q = A sqrt(c) s_x obeys

    dQ/dt = -(1/2) A a d(theta)/dt - A (a_x/2) sqrt(c) (r + s)
            - A^(-1) ((gamma+1)/4) u^((gamma-3)/4) Q^2

(and Y = A sqrt(c) r_x the mirror image on a minus curve, where
d(theta)/dt = sqrt(c) s_x).  The "differential" mode integrates this with
Heun steps, taking d(theta)/dt as the secant of theta(u) between samples;
the "volterra" mode marches the integrated-by-parts form, evaluating
d(A a)/dt analytically as A (a^2/2 + a_t +- c a_x).  The two routes share
only the path samples, so their agreement cross-validates both.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .damping import DampingSpec
from .errors import DomainError, InstabilityError
from .gas import GasLaw, theta_gamma, u_from_invariants
from .solver import FieldState, SolverHistory, interp_at


@dataclass
class CharPath:
    """A sampled characteristic curve, ordered by increasing t."""

    sign: int  # +1 for plus curves, -1 for minus curves
    anchor: tuple  # (t0, x0)
    t: np.ndarray
    x: np.ndarray
    c: np.ndarray
    u: np.ndarray
    r: np.ndarray
    s: np.ndarray
    a: np.ndarray
    a_x: np.ndarray
    A: Optional[np.ndarray] = None
    out_of_domain: bool = False

    def __len__(self):
        return self.t.size


def _sample_level(history: SolverHistory, i: int, xi: float):
    """(c, u, r, s) interpolated at xi on stored level i."""
    x = history.grid.x
    r_arr, s_arr = history.level_rs(i)
    c_arr = history.level_c(i)
    ri = interp_at(x, r_arr, xi)
    si = interp_at(x, s_arr, xi)
    ci = interp_at(x, c_arr, xi)
    ui = float(u_from_invariants(history.law, ri, si))
    return ci, ui, ri, si


def trace(history: SolverHistory, sign: int, anchor: tuple,
          direction: str = "forward", spec: Optional[DampingSpec] = None) -> CharPath:
    """Trace a characteristic from `anchor` = (t0, x0) through the history.

    t0 must coincide with a stored level (anchors are level points by
    construction: (0, x0) for forward traces, the final level for backward
    ones).  The path is clipped with a flag if it leaves the grid.
    """
    if sign not in (+1, -1):
        raise DomainError("sign must be +1 or -1")
    if direction not in ("forward", "backward"):
        raise DomainError("direction must be 'forward' or 'backward'")
    times = history.time_array
    t0, x0 = anchor
    i0 = int(np.argmin(np.abs(times - t0)))
    if abs(times[i0] - t0) > 1e-9 * max(1.0, abs(t0)):
        raise DomainError(
            f"anchor time {t0:g} does not match a stored level "
            f"(nearest: {times[i0]:g})")
    if not history.grid.x_min <= x0 <= history.grid.x_max:
        raise DomainError("anchor position outside the grid")

    grid = history.grid
    idx = range(i0, len(times) - 1) if direction == "forward" \
        else range(i0, 0, -1)

    ts, xs, cs, us, rs, ss = [], [], [], [], [], []
    xi = float(x0)
    clipped = False

    ci, ui, ri, si = _sample_level(history, i0, xi)
    ts.append(times[i0]); xs.append(xi); cs.append(ci)
    us.append(ui); rs.append(ri); ss.append(si)

    for k in idx:
        k_next = k + 1 if direction == "forward" else k - 1
        h = times[k_next] - times[k]
        k1 = sign * interp_at(grid.x, history.level_c(k), xi)
        x_pred = xi + h * k1
        k2 = sign * interp_at(grid.x, history.level_c(k_next), x_pred)
        xi = xi + 0.5 * h * (k1 + k2)
        if xi < grid.x_min or xi > grid.x_max:
            clipped = True
            xi = min(max(xi, grid.x_min), grid.x_max)
        ci, ui, ri, si = _sample_level(history, k_next, xi)
        ts.append(times[k_next]); xs.append(xi); cs.append(ci)
        us.append(ui); rs.append(ri); ss.append(si)
        if clipped:
            break

    order = slice(None) if direction == "forward" else slice(None, None, -1)
    t_arr = np.asarray(ts)[order]
    x_arr = np.asarray(xs)[order]
    spec = spec or DampingSpec.zero()
    path = CharPath(
        sign=sign, anchor=(float(t0), float(x0)),
        t=t_arr, x=x_arr,
        c=np.asarray(cs)[order], u=np.asarray(us)[order],
        r=np.asarray(rs)[order], s=np.asarray(ss)[order],
        a=np.asarray(spec.eval_a(t_arr, x_arr), dtype=float),
        a_x=np.asarray(spec.eval_a_x(t_arr, x_arr), dtype=float),
        out_of_domain=clipped)
    return path


def integrating_factor(path: CharPath, spec: DampingSpec) -> np.ndarray:
    """A(t) = exp(trapezoid of a/2 along the path); requires samples from
    tau = 0 so that A(0) = 1.  Stores and returns the per-sample values."""
    if path.t[0] > 1e-9:
        raise DomainError("integrating factor requires a path sampled from tau = 0")
    a = np.asarray(spec.eval_a(path.t, path.x), dtype=float)
    half = np.concatenate(
        ([0.0], np.cumsum(0.25 * (a[1:] + a[:-1]) * np.diff(path.t))))
    A = np.exp(half)
    path.A = A
    path.a = a
    path.a_x = np.asarray(spec.eval_a_x(path.t, path.x), dtype=float)
    return A


@dataclass
class RegionSpec:
    """Outside-the-cone region bounded by forward characteristics from
    (0, x0): both rays for x0 = 0, a single ray for +-x0 > 0."""

    kind: str  # omega | omega_plus | omega_minus
    x0: float
    t_samples: np.ndarray
    xb_plus: Optional[np.ndarray] = None
    xb_minus: Optional[np.ndarray] = None

    def boundary_plus(self, t):
        return np.interp(t, self.t_samples, self.xb_plus)

    def boundary_minus(self, t):
        return np.interp(t, self.t_samples, self.xb_minus)

    def mask(self, t, x):
        x = np.asarray(x)
        if self.kind == "omega":
            return (x >= self.boundary_plus(t)) | (x <= self.boundary_minus(t))
        if self.kind == "omega_plus":
            return x >= self.boundary_plus(t)
        return x <= self.boundary_minus(t)

    def contains(self, t, x, tol: float = 0.0) -> bool:
        if self.kind == "omega":
            return bool(x >= self.boundary_plus(t) - tol
                        or x <= self.boundary_minus(t) + tol)
        if self.kind == "omega_plus":
            return bool(x >= self.boundary_plus(t) - tol)
        return bool(x <= self.boundary_minus(t) + tol)


def _region_kind(x0: float) -> str:
    if x0 > 0.0:
        return "omega_plus"
    if x0 < 0.0:
        return "omega_minus"
    return "omega"


def region_boundaries(history: SolverHistory, x0: float,
                      spec: Optional[DampingSpec] = None) -> RegionSpec:
    """Trace the forward boundary curves x_+-(.; 0, x0) and package them."""
    kind = _region_kind(x0)
    t0 = history.times[0]
    plus = minus = None
    tsamp = None
    if kind in ("omega", "omega_plus"):
        p = trace(history, +1, (t0, x0), "forward", spec)
        plus, tsamp = p.x, p.t
    if kind in ("omega", "omega_minus"):
        m = trace(history, -1, (t0, x0), "forward", spec)
        minus, tsamp = m.x, m.t
    return RegionSpec(kind=kind, x0=x0, t_samples=tsamp,
                      xb_plus=plus, xb_minus=minus)


class ForwardBoundaries:
    """run_until hook advancing the region boundary curves alongside the
    solve (same Heun + interpolation rule as post-pass tracing)."""

    def __init__(self, x0: float):
        self.x0 = float(x0)
        self.kind = _region_kind(x0)
        self.t: list[float] = []
        self.xp: list[float] = []
        self.xm: list[float] = []

    def on_start(self, t, x, r, s, c):
        self.t.append(float(t))
        self.xp.append(self.x0)
        self.xm.append(self.x0)
        return None

    def on_step(self, t_new, dt, x, rn, sn, cn, c_prev):
        xp, xm = self.xp[-1], self.xm[-1]
        k1 = interp_at(x, c_prev, xp)
        k2 = interp_at(x, cn, xp + dt * k1)
        xp = min(xp + 0.5 * dt * (k1 + k2), x[-1])
        k1 = -interp_at(x, c_prev, xm)
        k2 = -interp_at(x, cn, xm + dt * k1)
        xm = max(xm + 0.5 * dt * (k1 + k2), x[0])
        self.t.append(float(t_new))
        self.xp.append(xp)
        self.xm.append(xm)
        return None

    def region(self) -> RegionSpec:
        return RegionSpec(kind=self.kind, x0=self.x0,
                          t_samples=np.asarray(self.t),
                          xb_plus=np.asarray(self.xp),
                          xb_minus=np.asarray(self.xm))


@dataclass
class RiccatiState:
    """History of Q (plus path) or Y (minus path) along one characteristic."""

    kind: str  # "Q" | "Y"
    t: np.ndarray
    value: np.ndarray
    blown_up: bool = False
    q0: float = 0.0


def initial_gradient_value(history: SolverHistory, sign: int, x0: float) -> float:
    """Q(0) = sqrt(c) s_x (plus) or Y(0) = sqrt(c) r_x (minus) at (0, x0),
    from centered differences of the first stored level."""
    state = history.level_state(0)
    gx = state.sx if sign > 0 else state.rx
    return (np.sqrt(interp_at(history.grid.x, state.c, x0))
            * interp_at(history.grid.x, gx, x0))


def _riccati_pieces(path: CharPath, law: GasLaw, spec: DampingSpec):
    if path.A is None:
        integrating_factor(path, spec)
    kappa = 0.25 * (law.gamma + 1.0)
    ucoef = kappa * path.u ** (0.25 * (law.gamma - 3.0))
    theta = np.asarray(theta_gamma(law, path.u), dtype=float)
    sqc = np.sqrt(path.c)
    src_ax = path.A * 0.5 * path.a_x * sqc * (path.r + path.s)
    return ucoef, theta, sqc, src_ax


def riccati_evolve(path: CharPath, law: GasLaw, spec: DampingSpec,
                   mode: str = "differential", q0: Optional[float] = None,
                   g_stop: float = 1e4) -> RiccatiState:
    """Evolve Q (plus path) or Y (minus path) along the path samples."""
    if mode not in ("differential", "volterra"):
        raise DomainError("mode must be 'differential' or 'volterra'")
    if q0 is None:
        raise DomainError("q0 (initial sqrt(c) * gradient) is required")
    ucoef, theta, sqc, src_ax = _riccati_pieces(path, law, spec)
    A = path.A
    n = len(path)
    qv = np.empty(n)
    qv[0] = q0
    blown = False
    max_A = A[0]
    max_sqc = sqc[0]

    def stopped(k):
        nonlocal max_A, max_sqc
        max_A = max(max_A, A[k])
        max_sqc = max(max_sqc, sqc[k])
        return (not np.isfinite(qv[k])) or abs(qv[k]) >= g_stop * max_A * max_sqc

    if mode == "differential":
        for k in range(n - 1):
            h = path.t[k + 1] - path.t[k]
            dtheta = (theta[k + 1] - theta[k]) / h if h > 0 else 0.0

            def rhs(q, j):
                return (-0.5 * A[j] * path.a[j] * dtheta - src_ax[j]
                        - ucoef[j] * q * q / A[j])

            q = qv[k]
            q_pred = q + h * rhs(q, k)
            qv[k + 1] = q + 0.5 * h * (rhs(q, k) + rhs(q_pred, k + 1))
            if stopped(k + 1):
                blown = True
                n = k + 2
                break
    else:
        # d(A a)/dt expanded analytically along the path
        a_t = np.asarray(spec.eval_a_t(path.t, path.x), dtype=float)
        dAa = A * (0.5 * path.a * path.a + a_t + path.sign * path.c * path.a_x)
        i1 = _cumtrapz(0.5 * dAa * theta, path.t)
        bterm = -0.5 * (A * path.a * theta - path.a[0] * theta[0])
        i2 = -_cumtrapz(src_ax, path.t)
        quad_acc = 0.0
        g = ucoef / A
        for k in range(n - 1):
            h = path.t[k + 1] - path.t[k]
            base = qv[0] + i1[k + 1] + bterm[k + 1] + i2[k + 1]
            q_pred = qv[k]
            for _ in range(2):
                panel = 0.5 * h * (g[k] * qv[k] ** 2 + g[k + 1] * q_pred ** 2)
                q_pred = base - quad_acc - panel
            quad_acc += 0.5 * h * (g[k] * qv[k] ** 2 + g[k + 1] * q_pred ** 2)
            qv[k + 1] = base - quad_acc
            if stopped(k + 1):
                blown = True
                n = k + 2
                break

    vals = qv[:n]
    tt = path.t[:n]
    if vals.size and not np.isfinite(vals[-1]):
        # a one-panel jump past the pole is still a blow-up, not a failure
        vals, tt, blown = vals[:-1], tt[:-1], True
    if not np.all(np.isfinite(vals)):
        raise InstabilityError("non-finite Riccati state")
    return RiccatiState(kind="Q" if path.sign > 0 else "Y",
                        t=tt, value=vals, blown_up=blown, q0=float(q0))


def _cumtrapz(y, t):
    out = np.empty_like(y)
    out[0] = 0.0
    np.cumsum(0.5 * (y[1:] + y[:-1]) * np.diff(t), out=out[1:])
    return out


def gradient_crosscheck(path: CharPath, history: SolverHistory,
                        ric: RiccatiState) -> float:
    """Max relative deviation between the Riccati value and the grid route
    A sqrt(c) * g_x interpolated along the path, skipping samples whose
    gradient is under the 10*dx noise floor."""
    dx = history.grid.dx
    x = history.grid.x
    times = history.time_array
    floor = 10.0 * dx
    worst = 0.0
    for k in range(len(ric.t)):
        i = int(np.argmin(np.abs(times - ric.t[k])))
        if abs(times[i] - ric.t[k]) > 1e-9 * max(1.0, ric.t[k]):
            continue
        state = history.level_state(i)
        gx_arr = state.sx if path.sign > 0 else state.rx
        gx = interp_at(x, gx_arr, path.x[k])
        if abs(gx) < floor:
            continue
        q_grid = path.A[k] * np.sqrt(path.c[k]) * gx
        dev = abs(ric.value[k] - q_grid) / abs(q_grid)
        worst = max(worst, dev)
    return worst
