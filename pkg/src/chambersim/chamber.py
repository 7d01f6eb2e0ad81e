"""Deterministic discrete-time chamber world.

Three entities live in a bounded rectangle: a base station (gNB)
confined to a horizontal rail, a user terminal (UE), and a rectangular
obstacle. Each tick advances every entity under its motion model, then
recomputes line-of-sight between gNB and UE, the blockage geometry
needed by the reward, and the radio path loss.

All types are frozen dataclasses; every operation is a pure function,
so the module is safe to call from any thread.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Optional, Union

from .config import ChamberConfig, EntityLayout

LOS = 0
NLOS = 1


class Kind(enum.Enum):
    GNB = "gnb"
    UE = "ue"
    OBSTACLE = "obstacle"


# --------------------------------------------------------------------------
# Motion models


@dataclass(frozen=True)
class Static:
    """Entity never moves."""


@dataclass(frozen=True)
class BounceX:
    """Constant-speed horizontal shuttle reflecting at min_x / max_x."""

    speed: float
    min_x: float
    max_x: float


@dataclass(frozen=True)
class Scripted:
    """Piecewise-linear waypoint trajectory; holds the last waypoint.

    Waypoints are (time_s, x, y) with strictly increasing times,
    relative to the moment the model was attached. `elapsed` is the
    model's own clock and advances one tick per step.
    """

    waypoints: tuple[tuple[float, float, float], ...]
    elapsed: float = 0.0

    def sample(self, t: float) -> tuple[float, float, float, float]:
        """Position and velocity at model time t: (x, y, vx, vy)."""
        wps = self.waypoints
        if t <= wps[0][0]:
            return wps[0][1], wps[0][2], 0.0, 0.0
        if t >= wps[-1][0]:
            return wps[-1][1], wps[-1][2], 0.0, 0.0
        for (t0, x0, y0), (t1, x1, y1) in zip(wps, wps[1:]):
            if t0 <= t < t1:
                frac = (t - t0) / (t1 - t0)
                vx = (x1 - x0) / (t1 - t0)
                vy = (y1 - y0) / (t1 - t0)
                return x0 + frac * (x1 - x0), y0 + frac * (y1 - y0), vx, vy
        return wps[-1][1], wps[-1][2], 0.0, 0.0


@dataclass(frozen=True)
class Controlled:
    """Velocity applied externally (the agent-driven gNB)."""


MotionModel = Union[Static, BounceX, Scripted, Controlled]


def validate_motion(motion: MotionModel, cfg: ChamberConfig) -> None:
    if isinstance(motion, BounceX):
        if motion.speed <= 0:
            raise ValueError("BounceX speed must be positive")
        if not (0 <= motion.min_x < motion.max_x <= cfg.width):
            raise ValueError("BounceX bounds must satisfy 0 <= min_x < max_x <= width")
    elif isinstance(motion, Scripted):
        times = [wp[0] for wp in motion.waypoints]
        if len(times) < 1:
            raise ValueError("Scripted needs at least one waypoint")
        if any(t1 <= t0 for t0, t1 in zip(times, times[1:])):
            raise ValueError("Scripted waypoint times must be strictly increasing")


# --------------------------------------------------------------------------
# Entities


@dataclass(frozen=True)
class Entity:
    kind: Kind
    x: float
    y: float
    vx: float = 0.0
    vy: float = 0.0
    half_x: float = 0.0
    half_y: float = 0.0
    motion: MotionModel = Static()

    @property
    def position(self) -> tuple[float, float]:
        return (self.x, self.y)

    @property
    def velocity(self) -> tuple[float, float]:
        return (self.vx, self.vy)


def make_gnb(cfg: ChamberConfig, x: float, vx: float = 0.0) -> Entity:
    return Entity(Kind.GNB, x=x, y=cfg.gnb_track_y, vx=vx, motion=Controlled())


def make_ue(x: float, y: float, motion: MotionModel = Static(), vx: float = 0.0, vy: float = 0.0) -> Entity:
    return Entity(Kind.UE, x=x, y=y, vx=vx, vy=vy, motion=motion)


def make_obstacle(
    x: float,
    y: float,
    half_x: float,
    half_y: float,
    motion: MotionModel = Static(),
    vx: float = 0.0,
    vy: float = 0.0,
) -> Entity:
    return Entity(Kind.OBSTACLE, x=x, y=y, vx=vx, vy=vy, half_x=half_x, half_y=half_y, motion=motion)


def step_entity(e: Entity, cfg: ChamberConfig) -> Entity:
    """Advance one tick under the entity's motion model."""
    dt = cfg.tick
    motion = e.motion
    if isinstance(motion, Static):
        return e
    if isinstance(motion, BounceX):
        x = e.x + e.vx * dt
        vx = e.vx
        lo, hi = motion.min_x, motion.max_x
        # fold back into [lo, hi]; loop handles multiple reflections per tick
        while x < lo or x > hi:
            if x < lo:
                x = 2 * lo - x
            else:
                x = 2 * hi - x
            vx = -vx
        return replace(e, x=x, vx=vx)
    if isinstance(motion, Scripted):
        elapsed = motion.elapsed + dt
        x, y, vx, vy = motion.sample(elapsed)
        return replace(e, x=x, y=y, vx=vx, vy=vy, motion=replace(motion, elapsed=elapsed))
    if isinstance(motion, Controlled):
        x = min(max(e.x + e.vx * dt, 0.0), cfg.width)
        return replace(e, x=x)
    raise TypeError(f"unknown motion model: {motion!r}")


# --------------------------------------------------------------------------
# Line of sight

Point = tuple[float, float]


def compute_los(gnb: Point, ue: Point, obs: Entity) -> tuple[int, Optional[float]]:
    """Open-set intersection test between the gNB-UE segment and the obstacle.

    Returns (LOS, None) or (NLOS, d_oc_norm) where d_oc_norm is the
    distance from the blockage chord's midpoint to the obstacle center,
    normalized by the obstacle half-diagonal and clamped to [0, 1].

    A segment that merely grazes the rectangle boundary does not
    occlude; a zero-length segment is LoS by definition.
    """
    if obs.kind is not Kind.OBSTACLE:
        raise ValueError("compute_los expects an OBSTACLE entity")

    px, py = gnb
    dx = ue[0] - px
    dy = ue[1] - py
    if dx == 0.0 and dy == 0.0:
        return LOS, None

    lo_x, hi_x = obs.x - obs.half_x, obs.x + obs.half_x
    lo_y, hi_y = obs.y - obs.half_y, obs.y + obs.half_y

    t_min, t_max = 0.0, 1.0
    for p, d, lo, hi in ((px, dx, lo_x, hi_x), (py, dy, lo_y, hi_y)):
        if d == 0.0:
            # parallel to this slab: must already lie strictly inside it
            if p <= lo or p >= hi:
                return LOS, None
        else:
            t1 = (lo - p) / d
            t2 = (hi - p) / d
            if t1 > t2:
                t1, t2 = t2, t1
            t_min = max(t_min, t1)
            t_max = min(t_max, t2)
    if not t_min < t_max:
        # touching (t_min == t_max) counts as clear
        return LOS, None

    t_mid = 0.5 * (t_min + t_max)
    mx = px + t_mid * dx
    my = py + t_mid * dy
    d_oc = math.hypot(mx - obs.x, my - obs.y)
    half_diag = math.hypot(obs.half_x, obs.half_y)
    return NLOS, min(d_oc / half_diag, 1.0)


def path_loss(d_ue: float, los: int, cfg: ChamberConfig) -> float:
    """Free-space path loss in dB, plus the NLoS attenuation factor.

    FSPL(d, f) = 32.44 + 20 log10(d_km) + 20 log10(f_MHz), with the
    distance floored so d = 0 is well defined.
    """
    if d_ue < 0:
        raise ValueError("distance must be non-negative")
    d_km = max(d_ue, cfg.distance_floor) / 1000.0
    loss = 32.44 + 20.0 * math.log10(d_km) + 20.0 * math.log10(cfg.carrier_frequency)
    if los == NLOS:
        loss += cfg.nlos_attenuation
    return loss


# --------------------------------------------------------------------------
# World state


@dataclass(frozen=True)
class ChamberState:
    tick_index: int
    gnb: Entity
    ue: Entity
    obstacle: Entity
    los: int
    path_loss: float
    d_ue: float
    d_oc_norm: Optional[float]

    @property
    def entities(self) -> tuple[Entity, Entity, Entity]:
        return (self.gnb, self.ue, self.obstacle)


def _with_geometry(tick_index: int, gnb: Entity, ue: Entity, obstacle: Entity, cfg: ChamberConfig) -> ChamberState:
    d_ue = math.hypot(ue.x - gnb.x, ue.y - gnb.y)
    los, d_oc_norm = compute_los(gnb.position, ue.position, obstacle)
    pl = path_loss(d_ue, los, cfg)
    return ChamberState(tick_index, gnb, ue, obstacle, los, pl, d_ue, d_oc_norm)


def initial_state(cfg: ChamberConfig, gnb: Entity, ue: Entity, obstacle: Entity) -> ChamberState:
    """World at tick 0 with the derived geometry filled in."""
    for e in (gnb, ue, obstacle):
        validate_motion(e.motion, cfg)
    return _with_geometry(0, gnb, ue, obstacle, cfg)


def default_initial_state(cfg: ChamberConfig, layout: EntityLayout) -> ChamberState:
    return initial_state(
        cfg,
        make_gnb(cfg, layout.gnb_x),
        make_ue(layout.ue_x, layout.ue_y),
        make_obstacle(layout.obstacle_x, layout.obstacle_y, layout.obstacle_half_x, layout.obstacle_half_y),
    )


def advance(state: ChamberState, gnb_velocity: float, cfg: ChamberConfig) -> ChamberState:
    """One tick: set the gNB velocity, move everything, recompute geometry."""
    if abs(gnb_velocity) > cfg.v_gnb_max + 1e-12:
        raise ValueError(f"|gnb_velocity| exceeds v_gnb_max: {gnb_velocity}")
    gnb = step_entity(replace(state.gnb, vx=gnb_velocity), cfg)
    ue = step_entity(state.ue, cfg)
    obstacle = step_entity(state.obstacle, cfg)
    return _with_geometry(state.tick_index + 1, gnb, ue, obstacle, cfg)
