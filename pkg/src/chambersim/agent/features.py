"""Observation encoding, discrete action semantics, and the reward.

The observation is an 11-feature vector: the gNB x-position, gNB-to-UE
and gNB-to-obstacle relative positions, all entity velocities, and the
binary LoS flag. The network consumes a normalized copy with positions
scaled affinely into [-1, 1] by the chamber extents and velocities
divided by their maxima; the LoS flag passes through unscaled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..chamber import NLOS, ChamberState
from ..config import ChamberConfig, TrainingConfig

FEATURE_NAMES = (
    "x_gnb",
    "x_gnb_ue",
    "y_gnb_ue",
    "x_gnb_obs",
    "y_gnb_obs",
    "vx_gnb",
    "vx_ue",
    "vy_ue",
    "vx_obs",
    "vy_obs",
    "los_status",
)

NUM_FEATURES = len(FEATURE_NAMES)
NUM_ACTIONS = 3

ACTION_MAINTAIN = 0
ACTION_INCREMENT = 1
ACTION_DECREMENT = 2

# default cap used to scale UE/obstacle velocities when no explicit
# object speed is configured (matches the stock scenario object speed)
DEFAULT_OBJECT_SPEED = 0.6


def encode_raw(cs: ChamberState) -> np.ndarray:
    """Raw (unnormalized) feature vector in the declared order."""
    gnb, ue, obs = cs.gnb, cs.ue, cs.obstacle
    return np.array(
        [
            gnb.x,
            ue.x - gnb.x,
            ue.y - gnb.y,
            obs.x - gnb.x,
            obs.y - gnb.y,
            gnb.vx,
            ue.vx,
            ue.vy,
            obs.vx,
            obs.vy,
            float(cs.los),
        ],
        dtype=np.float64,
    )


@dataclass(frozen=True)
class StateScales:
    width: float
    depth: float
    v_gnb_max: float
    v_obj_max: float

    @classmethod
    def from_config(cls, cfg: ChamberConfig, v_obj_max: float = DEFAULT_OBJECT_SPEED) -> "StateScales":
        return cls(width=cfg.width, depth=cfg.depth, v_gnb_max=cfg.v_gnb_max, v_obj_max=v_obj_max)


def normalize(raw: np.ndarray, scales: StateScales) -> np.ndarray:
    out = np.empty_like(raw)
    out[0] = raw[0] / scales.width * 2.0 - 1.0
    out[1] = raw[1] / scales.width
    out[2] = raw[2] / scales.depth
    out[3] = raw[3] / scales.width
    out[4] = raw[4] / scales.depth
    out[5] = raw[5] / scales.v_gnb_max
    out[6] = raw[6] / scales.v_obj_max
    out[7] = raw[7] / scales.v_obj_max
    out[8] = raw[8] / scales.v_obj_max
    out[9] = raw[9] / scales.v_obj_max
    out[10] = raw[10]
    return out


def encode_state(cs: ChamberState, cfg: ChamberConfig, scales: StateScales | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Both forms of the observation: (raw, normalized)."""
    raw = encode_raw(cs)
    return raw, normalize(raw, scales or StateScales.from_config(cfg))


def apply_action(vx_gnb: float, action: int, cfg: ChamberConfig) -> float:
    """New gNB velocity after a maintain/increment/decrement action."""
    if action == ACTION_MAINTAIN:
        v = vx_gnb
    elif action == ACTION_INCREMENT:
        v = vx_gnb + cfg.velocity_step
    elif action == ACTION_DECREMENT:
        v = vx_gnb - cfg.velocity_step
    else:
        raise ValueError(f"unknown action id: {action}")
    return min(max(v, -cfg.v_gnb_max), cfg.v_gnb_max)


def evaluate_reward(cs_next: ChamberState, tc: TrainingConfig) -> float:
    """Reward computed from the post-action state.

    Obstructed: -1 + d_oc_norm, in [-1, 0) - deepest when the ray
    crosses the obstacle center, approaching 0 toward grazing incidence.
    Clear: gain * map(d_ue)^2 where map sends d_min_map -> 1 and
    d_max_map -> 0, clamped to [0, 1].
    """
    if cs_next.los == NLOS:
        return -1.0 + cs_next.d_oc_norm
    if tc.d_max_map is None:
        raise ValueError("TrainingConfig.d_max_map is unresolved; call resolved() first")
    m = (tc.d_max_map - cs_next.d_ue) / (tc.d_max_map - tc.d_min_map)
    m = min(max(m, 0.0), 1.0)
    return tc.reward_gain * m * m
