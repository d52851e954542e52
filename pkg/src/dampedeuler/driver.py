"""Run orchestration: single simulations, sweep workers, traces, and the
dual-solver comparison."""

from __future__ import annotations

from dataclasses import asdict, dataclass, replace
from typing import Optional

import numpy as np

from . import characteristics as chars
from . import lifespan, oracle, solver
from .config import RunConfig, Setup, build_setup, config_for_scenario
from .errors import FitFailureError
from .presets import get_preset


@dataclass
class SimOutput:
    setup: Setup
    result: solver.RunResult
    region: Optional[chars.RegionSpec]
    report: lifespan.BlowupReport
    phi_max_ratio: Optional[float]
    steepness: dict


def simulate(config: RunConfig) -> SimOutput:
    """One full run with region tracking and the blow-up report."""
    setup = build_setup(config)
    state = solver.init(setup.grid, setup.law, setup.data)
    boundaries = chars.ForwardBoundaries(setup.data.x0)
    hooks = [boundaries]
    phi_tracker = None
    if config.track_phi:
        phi_tracker = lifespan.PhiTracker(boundaries)
        hooks.append(phi_tracker)
    result = solver.run_until(
        state, setup.law, setup.spec, config.cfl, config.t_max,
        monitors=setup.monitors, hooks=tuple(hooks),
        keep_history=config.keep_history,
        history_stride=config.history_stride)
    region = boundaries.region()
    phi_ratio = phi_tracker.max_ratio if phi_tracker else None
    report = lifespan.build_report(result, region=region,
                                   phi_max_ratio=phi_ratio)
    return SimOutput(setup=setup, result=result, region=region, report=report,
                     phi_max_ratio=phi_ratio,
                     steepness=setup.data.steepness_report())


def sweep_payload(config: RunConfig, eps: float) -> dict:
    """Picklable per-epsilon work order for the sweep pool."""
    values = asdict(config)
    values["epsilon"] = float(eps)
    values["keep_history"] = False
    # sweeps size their own horizon and grid per epsilon
    if config.scenario is not None:
        preset = get_preset(config.scenario)
        values["t_max"] = preset.t_max_for(float(eps))
        values["x_min"] = None
        values["x_max"] = None
        values["nx"] = None
    values["epsilons"] = tuple(values["epsilons"])
    return values


MAX_HORIZON_DOUBLINGS = 3


def sweep_run(payload: dict) -> dict:
    """Run one sweep member; doubles the horizon (re-sizing the domain)
    when a run expected to blow up reaches it instead."""
    config = RunConfig(**payload)
    expect_blowup = True
    if config.scenario is not None:
        expect_blowup = get_preset(config.scenario).expect_blowup
    attempts = MAX_HORIZON_DOUBLINGS if expect_blowup else 0
    out = simulate(config)
    while out.result.cause == "horizon" and attempts > 0:
        attempts -= 1
        config = replace(config, t_max=2.0 * config.t_max)
        out = simulate(config)

    t_star = None
    if out.result.cause == "gradient":
        try:
            t_star = lifespan.estimate_T_star(out.result.series)
        except FitFailureError:
            t_star = None
    node_x = node_inside = None
    if out.result.cause == "gradient":
        node_x, node_inside, _peak = lifespan.localize_blowup(
            out.result.state, out.region)
    return {
        "epsilon": config.epsilon,
        "t_stop": float(out.result.state.t),
        "t_star": t_star,
        "stopped_cause": out.result.cause,
        "phi_max_ratio": out.phi_max_ratio,
        "node_x": node_x,
        "node_inside": node_inside,
    }


def trace_run(config: RunConfig, x0: float, sign: int,
              mode: str = "differential"):
    """Simulate with history retained, then trace the forward characteristic
    from (0, x0) with its integrating factor and Riccati state."""
    config = replace(config, keep_history=True)
    out = simulate(config)
    history = out.result.history
    path = chars.trace(history, sign, (history.times[0], x0), "forward",
                       out.setup.spec)
    chars.integrating_factor(path, out.setup.spec)
    q0 = chars.initial_gradient_value(history, sign, x0)
    ric = chars.riccati_evolve(path, out.setup.law, out.setup.spec, mode,
                               q0=q0, g_stop=config.g_stop)
    return out, path, ric


def oracle_compare(config: RunConfig, nx_list) -> dict:
    """L_inf(u, v) differences between the invariant solver and the
    conservative oracle at t = t_max, per grid."""
    rows = []
    for nx in nx_list:
        cfg = replace(config, nx=int(nx), keep_history=False,
                      track_phi=False)
        setup = build_setup(cfg)
        state = solver.init(setup.grid, setup.law, setup.data)
        res = solver.run_until(state, setup.law, setup.spec, cfg.cfl,
                               cfg.t_max, monitors=setup.monitors)
        if res.cause != "horizon":
            raise FitFailureError(
                f"comparison run stopped early ({res.cause}); "
                "choose a smooth pre-blow-up t_max")
        cons = oracle.lax_friedrichs_run(setup.grid, setup.law, setup.spec,
                                         setup.data, cfg.t_max, cfl=min(cfg.cfl, 0.9))
        rows.append({
            "nx": int(nx),
            "linf_u": float(np.max(np.abs(res.state.u - cons.u))),
            "linf_v": float(np.max(np.abs(res.state.v - cons.v))),
        })
    return {
        "t_compare": config.t_max,
        "linf_u": rows[-1]["linf_u"],
        "linf_v": rows[-1]["linf_v"],
        "grids": rows,
    }
