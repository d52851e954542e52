"""Blow-up detection, life-span estimation, Phi diagnostics and epsilon
sweeps.

Near a gradient catastrophe the sup gradient obeys a Riccati law, so its
reciprocal is asymptotically affine in t:  1/g(t) ~ C (T* - t).  The
life-span estimate is therefore the t-intercept of a least-squares affine
fit of 1/g over a trailing window (the best of the last 10/20/40% of
samples by normalized residual), which is far more grid-robust than the
raw threshold-crossing time.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .characteristics import ForwardBoundaries, RegionSpec
from .errors import FitFailureError, InsufficientDataError
from .solver import FieldState, RunResult, SolverHistory, TimeSeries, sup_norms_on_region

GROWTH_PRECONDITION = 10.0  # required gradient growth over its initial sup
MIN_GROWN_SAMPLES = 8
WINDOW_FRACTIONS = (0.10, 0.20, 0.40)


def estimate_T_star(series: TimeSeries) -> float:
    """t-intercept of the affine fit of 1/g(t) on the best trailing window."""
    t = series.t
    g = series.gradient_sup
    if t.size < MIN_GROWN_SAMPLES + 2:
        raise FitFailureError("too few samples for a reciprocal fit")
    g0 = g[0] if g[0] > 0.0 else float(np.min(g[g > 0], initial=np.inf))
    grown = int(np.count_nonzero(g > GROWTH_PRECONDITION * g0))
    if grown < MIN_GROWN_SAMPLES:
        raise FitFailureError(
            f"only {grown} samples exceed {GROWTH_PRECONDITION:g}x the initial "
            "gradient; series does not look like a blow-up")

    best = None
    for frac in WINDOW_FRACTIONS:
        n = max(MIN_GROWN_SAMPLES, int(round(frac * t.size)))
        tw = t[-n:]
        yw = 1.0 / g[-n:]
        keep = np.isfinite(yw) & (g[-n:] > 0)
        if np.count_nonzero(keep) < MIN_GROWN_SAMPLES:
            continue
        slope, icpt = np.polyfit(tw[keep], yw[keep], 1)
        resid = yw[keep] - (slope * tw[keep] + icpt)
        scale = float(np.mean(np.abs(yw[keep])))
        score = float(np.sqrt(np.mean(resid ** 2))) / max(scale, 1e-300)
        if best is None or score < best[0]:
            best = (score, slope, icpt)
    if best is None:
        raise FitFailureError("no usable fitting window")
    _, slope, icpt = best
    if slope >= 0.0:
        raise FitFailureError("reciprocal gradient is not decreasing")
    t_star = -icpt / slope
    t_end = float(t[-1])
    if t_star <= 0.9 * t_end:
        raise FitFailureError(
            f"intercept {t_star:g} falls before the recorded window end "
            f"{t_end:g}; stopping was not Riccati-like")
    return float(t_star)


def phi_series(history: SolverHistory, region: RegionSpec):
    """(t, Phi(t)) per stored level, Phi = sup|r| + sup|s| over the region."""
    out_t = np.empty(len(history))
    out_phi = np.empty(len(history))
    for i in range(len(history)):
        state = history.level_state(i)
        sup = sup_norms_on_region(state, region)
        out_t[i] = history.times[i]
        out_phi[i] = sup.sup_r + sup.sup_s
    return out_t, out_phi


class PhiTracker:
    """run_until hook computing Phi(t) live from co-advanced boundaries.

    Must be placed after its ForwardBoundaries hook so it reads the
    already-updated positions.
    """

    def __init__(self, boundaries: ForwardBoundaries):
        self.boundaries = boundaries
        self.phi: list[float] = []

    def _phi(self, x, r, s):
        b = self.boundaries
        sup_r = 0.0
        sup_s = 0.0
        hit = False
        if b.kind in ("omega", "omega_minus"):
            i = int(np.searchsorted(x, b.xm[-1], side="right"))
            if i > 0:
                sup_r = max(sup_r, float(np.max(np.abs(r[:i]))))
                sup_s = max(sup_s, float(np.max(np.abs(s[:i]))))
                hit = True
        if b.kind in ("omega", "omega_plus"):
            i = int(np.searchsorted(x, b.xp[-1], side="left"))
            if i < x.size:
                sup_r = max(sup_r, float(np.max(np.abs(r[i:]))))
                sup_s = max(sup_s, float(np.max(np.abs(s[i:]))))
                hit = True
        return sup_r + sup_s if hit else 0.0

    def on_start(self, t, x, r, s, c):
        val = self._phi(x, r, s)
        self.phi.append(val)
        return {"phi_region": val}

    def on_step(self, t_new, dt, x, rn, sn, cn, c_prev):
        val = self._phi(x, rn, sn)
        self.phi.append(val)
        return {"phi_region": val}

    @property
    def max_ratio(self) -> float:
        phi0 = self.phi[0]
        if phi0 <= 0.0:
            return np.nan
        return float(np.max(self.phi)) / phi0


def localize_blowup(state: FieldState, region: Optional[RegionSpec],
                    tol: Optional[float] = None):
    """Grid node of the final max gradient and whether it lies in the region
    (one-node tolerance by default: the blow-up characteristic merges with
    the region boundary at leading order for symmetric data)."""
    mag_r = np.abs(state.rx)
    mag_s = np.abs(state.sx)
    if float(np.max(mag_r)) >= float(np.max(mag_s)):
        idx = int(np.argmax(mag_r))
        peak = "r_x"
    else:
        idx = int(np.argmax(mag_s))
        peak = "s_x"
    x_node = float(state.grid.x[idx])
    inside = None
    if region is not None:
        if tol is None:
            tol = state.grid.dx
        inside = region.contains(state.t, x_node, tol=tol)
    return x_node, inside, peak


@dataclass
class BlowupReport:
    stopped_cause: str
    t_stop: float
    t_star_estimate: Optional[float]
    blowup_node_x: Optional[float]
    peak_quantity: Optional[str]
    phi_max_ratio: Optional[float]

    def to_dict(self):
        return {
            "stopped_cause": self.stopped_cause,
            "t_stop": self.t_stop,
            "t_star_estimate": self.t_star_estimate,
            "blowup_node_x": self.blowup_node_x,
            "peak_quantity": self.peak_quantity,
            "phi_max_ratio": self.phi_max_ratio,
        }


def build_report(result: RunResult, region: Optional[RegionSpec] = None,
                 phi_max_ratio: Optional[float] = None) -> BlowupReport:
    t_star = None
    node = peak = None
    if result.cause == "gradient":
        t_star = estimate_T_star(result.series)
        node, _inside, peak = localize_blowup(result.state, region)
    if phi_max_ratio is None:
        phi = result.series.phi_region
        finite = phi[np.isfinite(phi)]
        if finite.size and finite[0] > 0.0:
            phi_max_ratio = float(np.max(finite) / finite[0])
    return BlowupReport(
        stopped_cause=result.cause,
        t_stop=float(result.state.t),
        t_star_estimate=t_star,
        blowup_node_x=node,
        peak_quantity=peak,
        phi_max_ratio=phi_max_ratio,
    )


# ---------------------------------------------------------------------------
# epsilon sweeps
# ---------------------------------------------------------------------------

@dataclass
class SweepRow:
    epsilon: float
    t_stop: float
    t_star: Optional[float]
    stopped_cause: str
    phi_max_ratio: Optional[float] = None
    node_x: Optional[float] = None
    node_inside: Optional[bool] = None

    def to_dict(self):
        return {"epsilon": self.epsilon, "t_stop": self.t_stop,
                "t_star": self.t_star, "stopped_cause": self.stopped_cause}


@dataclass
class SweepResult:
    rows: list
    model: str  # "power" | "exponential"
    exponent_or_rate: float
    r_squared: float
    rows_used: int

    def fit_dict(self):
        return {"model": self.model,
                "exponent_or_rate": self.exponent_or_rate,
                "r_squared": self.r_squared,
                "rows_used": self.rows_used}


def _r_squared(xf, yf):
    slope, icpt = np.polyfit(xf, yf, 1)
    pred = slope * xf + icpt
    ss_res = float(np.sum((yf - pred) ** 2))
    ss_tot = float(np.sum((yf - np.mean(yf)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 0.0
    return slope, r2


def fit_scaling(rows) -> SweepResult:
    """Fit log T* against log eps (power) and 1/eps (exponential); report
    the higher-R^2 model.  Only gradient-stopped rows enter."""
    used = [row for row in rows if row.stopped_cause == "gradient"
            and row.t_star is not None and row.t_star > 0]
    if len(used) < 3:
        raise InsufficientDataError(
            f"only {len(used)} gradient-stopped rows; need at least 3")
    eps = np.array([row.epsilon for row in used])
    logT = np.log([row.t_star for row in used])
    p_slope, p_r2 = _r_squared(np.log(eps), logT)
    e_slope, e_r2 = _r_squared(1.0 / eps, logT)
    if p_r2 >= e_r2:
        return SweepResult(list(rows), "power", float(p_slope), float(p_r2),
                           len(used))
    return SweepResult(list(rows), "exponential", float(e_slope), float(e_r2),
                       len(used))


def _sweep_worker(payload):
    # local import: driver imports this module
    from . import driver

    return driver.sweep_run(payload)


def default_workers() -> int:
    env = os.environ.get("DAMPEDEULER_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_sweep(config, epsilons, workers: Optional[int] = None) -> SweepResult:
    """Independent simulations per epsilon, then a scaling-law fit.

    Results are keyed and ordered by epsilon, so serial and concurrent
    execution produce identical output.
    """
    from . import driver

    epsilons = sorted(set(float(e) for e in epsilons), reverse=True)
    if len(epsilons) < 3:
        raise InsufficientDataError("need at least 3 epsilon values")
    payloads = [driver.sweep_payload(config, eps) for eps in epsilons]
    if workers is None:
        workers = default_workers()
    if workers <= 1 or len(payloads) == 1:
        outcomes = [_sweep_worker(p) for p in payloads]
    else:
        with ProcessPoolExecutor(max_workers=min(workers, len(payloads))) as pool:
            outcomes = list(pool.map(_sweep_worker, payloads))
    rows = [SweepRow(**o) for o in outcomes]
    return fit_scaling(rows)
