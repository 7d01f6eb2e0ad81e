"""Policy evaluation: greedy rollouts, static baselines, benchmark suite."""

from __future__ import annotations

from pathlib import Path
from typing import Optional

from .agent.dqn import select_action
from .agent.features import apply_action, encode_raw, evaluate_reward, normalize
from .agent.features import StateScales
from .agent.qnet import QNetwork
from .chamber import ChamberState, advance
from .config import AppConfig
from .metrics import ComparisonReport, RunTrace, compare
from .scenarios import USE_CASE_NAMES, V_OBJECT, build_use_case, validate_benchmark

import numpy as np

_GREEDY_RNG = np.random.default_rng(0)  # epsilon 0: never consulted


def rollout(
    app: AppConfig,
    state: ChamberState,
    policy: Optional[QNetwork],
    run_ticks: int,
    meta: dict[str, str],
) -> RunTrace:
    """Run the world for run_ticks ticks; a None policy holds the gNB still.

    The trace includes the initial state as tick 0 (action "maintain",
    reward of simply being there), then one row per advance.
    """
    cfg = app.chamber
    tc = app.training.resolved(cfg)
    scales = StateScales.from_config(cfg, v_obj_max=V_OBJECT)
    trace = RunTrace(meta=dict(meta))
    trace.append_state(state, 0, evaluate_reward(state, tc))
    for _ in range(run_ticks - 1):
        if policy is None:
            action = 0
            velocity = 0.0
        else:
            s_norm = normalize(encode_raw(state), scales)
            action = select_action(policy, s_norm, 0.0, _GREEDY_RNG)
            velocity = apply_action(state.gnb.vx, action, cfg)
        state = advance(state, velocity, cfg)
        trace.append_state(state, action, evaluate_reward(state, tc))
    return trace


def base_meta(app: AppConfig, use_case: str, policy_id: str, seed: int) -> dict[str, str]:
    return {
        "use_case": use_case,
        "policy_id": policy_id,
        "seed": str(seed),
        "config_hash": app.hash(),
        "dt": repr(app.chamber.tick),
    }


def run_use_case(
    app: AppConfig,
    name: str,
    policy: Optional[QNetwork],
    policy_id: str,
    seed: int,
) -> RunTrace:
    state = build_use_case(name, app.chamber, app.layout)
    run_ticks = app.evaluation.run_ticks
    return rollout(app, state, policy, run_ticks, base_meta(app, name, policy_id, seed))


def run_benchmark(
    app: AppConfig,
    policy: QNetwork,
    policy_id: str,
    seed: int,
    use_cases: tuple[str, ...] = USE_CASE_NAMES,
    out_dir: str | Path | None = None,
) -> dict[str, ComparisonReport]:
    """Policy vs static baseline across the evaluation suite."""
    reports: dict[str, ComparisonReport] = {}
    for name in use_cases:
        validate_benchmark(name, app.chamber, app.layout, app.evaluation.run_ticks)
        trace_rl = run_use_case(app, name, policy, policy_id, seed)
        trace_static = run_use_case(app, name, None, "static", seed)
        reports[name] = compare(trace_rl, trace_static)
        if out_dir is not None:
            out = Path(out_dir)
            out.mkdir(parents=True, exist_ok=True)
            safe = name.replace(".", "_")
            trace_rl.write_csv(out / f"trace_{safe}_rl.csv")
            trace_static.write_csv(out / f"trace_{safe}_static.csv")
    return reports
