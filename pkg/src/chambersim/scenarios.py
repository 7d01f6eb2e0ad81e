"""Training scenarios, evaluation use cases, and the episode scheduler.

A training episode chains four scenario segments of fixed length. The
obstacle and UE swap motion models at each boundary while the gNB keeps
its position and velocity, so control is continuous across the episode:

  A: static obstacle parked in front of the UE (persistent blockage)
  B: obstacle shuttles horizontally, UE parked
  C: UE shuttles horizontally, obstacle parked
  D: both shuttle at different speeds and phases

Evaluation runs use one-way scripted traversals instead: use case S
keeps everything static (the gNB starts blocked), O moves only the
obstacle, U moves only the UE, each under movement pattern 1 (left to
right) or 2 (right to left).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .chamber import (
    NLOS,
    BounceX,
    ChamberState,
    Entity,
    MotionModel,
    Scripted,
    Static,
    advance,
    initial_state,
    make_gnb,
    make_obstacle,
    make_ue,
)
from .config import ChamberConfig, EntityLayout

V_OBJECT = 0.6              # UE / obstacle speed in scenarios and MPs (m/s)
SCENARIO_D_OBSTACLE_SPEED = 0.45

SCENARIO_ORDER = ("A", "B", "C", "D")
SCENARIO_DURATIONS = {"A": 100, "B": 450, "C": 450, "D": 2000}
EPISODE_TICKS = sum(SCENARIO_DURATIONS.values())

MP_START_X = 2.0
MP_END_X = 6.0
MP_PREROLL_S = 1.0  # parked settle time before the traversal begins

USE_CASE_NAMES = ("S", "O.1", "O.2", "U.1", "U.2")


class OutOfEpisodeError(ValueError):
    """Step index beyond the episode layout."""


@dataclass(frozen=True)
class EntityPlan:
    """Placement and motion an entity adopts when a scenario begins."""

    x: float
    y: float
    vx: float
    vy: float
    motion: MotionModel


@dataclass(frozen=True)
class ScenarioSpec:
    id: str
    duration: int
    ue: EntityPlan
    obstacle: EntityPlan


def scenario_starts() -> dict[int, str]:
    """Episode step at which each scenario segment begins."""
    starts = {}
    at = 0
    for sid in SCENARIO_ORDER:
        starts[at] = sid
        at += SCENARIO_DURATIONS[sid]
    return starts


def scenario_id_at(step_in_episode: int) -> str:
    if not 0 <= step_in_episode < EPISODE_TICKS:
        raise OutOfEpisodeError(f"step {step_in_episode} outside [0, {EPISODE_TICKS})")
    at = 0
    for sid in SCENARIO_ORDER:
        at += SCENARIO_DURATIONS[sid]
        if step_in_episode < at:
            return sid
    raise OutOfEpisodeError(str(step_in_episode))  # unreachable


def build_scenario(sid: str, cfg: ChamberConfig, layout: EntityLayout, variant: int = 0) -> ScenarioSpec:
    """Concrete placements and motions for one scenario segment.

    `variant` (typically the episode number) alternates which side the
    moving entities start from in B and D, so approach directions are
    seen symmetrically across an episode sweep.
    """
    ue_rest = EntityPlan(layout.ue_x, layout.ue_y, 0.0, 0.0, Static())
    obs_rest = EntityPlan(layout.obstacle_x, layout.obstacle_y, 0.0, 0.0, Static())
    obs_range = (layout.obstacle_half_x, cfg.width - layout.obstacle_half_x)
    ue_range = (0.0, cfg.width)
    mirror = variant % 2 == 1

    if sid == "A":
        return ScenarioSpec("A", SCENARIO_DURATIONS["A"], ue_rest, obs_rest)
    if sid == "B":
        direction = -1.0 if mirror else 1.0
        obstacle = EntityPlan(
            layout.obstacle_x, layout.obstacle_y, direction * V_OBJECT, 0.0,
            BounceX(V_OBJECT, *obs_range),
        )
        return ScenarioSpec("B", SCENARIO_DURATIONS["B"], ue_rest, obstacle)
    if sid == "C":
        direction = -1.0 if mirror else 1.0
        ue = EntityPlan(
            layout.ue_x, layout.ue_y, direction * V_OBJECT, 0.0,
            BounceX(V_OBJECT, *ue_range),
        )
        return ScenarioSpec("C", SCENARIO_DURATIONS["C"], ue, obs_rest)
    if sid == "D":
        ue_side, obs_side = (0.75, 0.25) if mirror else (0.25, 0.75)
        ue = EntityPlan(
            cfg.width * ue_side, layout.ue_y, (-1.0 if mirror else 1.0) * V_OBJECT, 0.0,
            BounceX(V_OBJECT, *ue_range),
        )
        obstacle = EntityPlan(
            cfg.width * obs_side, layout.obstacle_y,
            (1.0 if mirror else -1.0) * SCENARIO_D_OBSTACLE_SPEED, 0.0,
            BounceX(SCENARIO_D_OBSTACLE_SPEED, *obs_range),
        )
        return ScenarioSpec("D", SCENARIO_DURATIONS["D"], ue, obstacle)
    raise ValueError(f"unknown scenario id: {sid}")


def scenario_at(step_in_episode: int, cfg: ChamberConfig, layout: EntityLayout, variant: int = 0) -> ScenarioSpec:
    return build_scenario(scenario_id_at(step_in_episode), cfg, layout, variant)


def _plan_entity(template: Entity, plan: EntityPlan) -> Entity:
    return replace(template, x=plan.x, y=plan.y, vx=plan.vx, vy=plan.vy, motion=plan.motion)


def instantiate_scenario(spec: ScenarioSpec, carryover: ChamberState, cfg: ChamberConfig) -> ChamberState:
    """Apply a scenario's placements, keeping the gNB exactly as carried."""
    ue = _plan_entity(carryover.ue, spec.ue)
    obstacle = _plan_entity(carryover.obstacle, spec.obstacle)
    state = initial_state(cfg, carryover.gnb, ue, obstacle)
    return replace(state, tick_index=carryover.tick_index)


def episode_initial_state(cfg: ChamberConfig, layout: EntityLayout) -> ChamberState:
    """Fresh world at the top of a training episode (scenario A layout)."""
    spec = build_scenario("A", cfg, layout)
    gnb = make_gnb(cfg, layout.gnb_x)
    ue = make_ue(spec.ue.x, spec.ue.y, motion=spec.ue.motion)
    obstacle = make_obstacle(
        spec.obstacle.x, spec.obstacle.y,
        layout.obstacle_half_x, layout.obstacle_half_y,
        motion=spec.obstacle.motion,
    )
    return initial_state(cfg, gnb, ue, obstacle)


# --------------------------------------------------------------------------
# Evaluation use cases


class BenchmarkInvalidError(ValueError):
    """The configured benchmark cannot discriminate (no baseline blockage)."""


def _traversal(y: float, forward: bool) -> tuple[Scripted, float, float]:
    """One-way movement pattern at v_obj after a short parked pre-roll."""
    if forward:
        x0, x1 = MP_START_X, MP_END_X
    else:
        x0, x1 = MP_END_X, MP_START_X
    seconds = abs(x1 - x0) / V_OBJECT
    motion = Scripted(((0.0, x0, y), (MP_PREROLL_S, x0, y), (MP_PREROLL_S + seconds, x1, y)))
    return motion, x0, 0.0


def build_use_case(name: str, cfg: ChamberConfig, layout: EntityLayout) -> ChamberState:
    """Initial world for an evaluation test ("S", "O.1", "O.2", "U.1", "U.2")."""
    if name not in USE_CASE_NAMES:
        raise ValueError(f"unknown use case {name!r}; expected one of {USE_CASE_NAMES}")
    gnb = make_gnb(cfg, layout.gnb_x)
    ue = make_ue(layout.ue_x, layout.ue_y)
    obstacle = make_obstacle(
        layout.obstacle_x, layout.obstacle_y,
        layout.obstacle_half_x, layout.obstacle_half_y,
    )
    if name.startswith("O"):
        motion, x0, vx = _traversal(layout.obstacle_y, forward=name.endswith("1"))
        obstacle = replace(obstacle, x=x0, vx=vx, motion=motion)
    elif name.startswith("U"):
        motion, x0, vx = _traversal(layout.ue_y, forward=name.endswith("1"))
        ue = replace(ue, x=x0, vx=vx, motion=motion)

    state = initial_state(cfg, gnb, ue, obstacle)
    if name == "S" and state.los != NLOS:
        raise BenchmarkInvalidError("use case S must start with the gNB obstructed")
    return state


def validate_benchmark(name: str, cfg: ChamberConfig, layout: EntityLayout, run_ticks: int) -> None:
    """Reject configurations whose static baseline never loses LoS."""
    state = build_use_case(name, cfg, layout)
    if state.los == NLOS:
        return
    for _ in range(run_ticks - 1):
        state = advance(state, 0.0, cfg)
        if state.los == NLOS:
            return
    raise BenchmarkInvalidError(
        f"use case {name}: static baseline keeps LoS for all {run_ticks} ticks"
    )
