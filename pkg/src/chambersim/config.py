"""Configuration types and the INI-style config file loader.

Every tunable of the simulator lives here: chamber geometry and RF
constants, initial entity placements, agent training hyperparameters,
evaluation run length, and the RF bridge endpoint. All values carry
defaults so an empty config file is valid.
"""

from __future__ import annotations

import configparser
import hashlib
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path


class ConfigError(ValueError):
    """Raised when a configuration violates an invariant."""


@dataclass(frozen=True)
class ChamberConfig:
    """Static parameters of the chamber world.

    Units: meters, seconds, MHz, dB, m/s.
    """

    width: float = 8.0
    depth: float = 5.0
    tick: float = 0.2
    carrier_frequency: float = 3500.0
    nlos_attenuation: float = 20.0
    gnb_track_y: float = 0.5
    v_gnb_max: float = 1.0
    velocity_step: float = 0.35
    # floor applied to the gNB-UE distance inside the path loss model,
    # so a zero distance never reaches log10
    distance_floor: float = 0.1

    def validate(self) -> None:
        if self.width <= 0 or self.depth <= 0:
            raise ConfigError("chamber extents must be positive")
        if self.tick <= 0:
            raise ConfigError("tick must be positive")
        if self.v_gnb_max <= 0:
            raise ConfigError("v_gnb_max must be positive")
        if self.velocity_step <= 0:
            raise ConfigError("velocity_step must be positive")
        if self.velocity_step > 2 * self.v_gnb_max:
            raise ConfigError("velocity_step must not exceed 2 * v_gnb_max")
        if self.nlos_attenuation < 0:
            raise ConfigError("nlos_attenuation must be non-negative")
        if not 0 <= self.gnb_track_y <= self.depth:
            raise ConfigError("gnb_track_y must lie inside the chamber")
        if self.distance_floor <= 0:
            raise ConfigError("distance_floor must be positive")

    @property
    def diagonal(self) -> float:
        return math.hypot(self.width, self.depth)


@dataclass(frozen=True)
class EntityLayout:
    """Initial placements of the three entities.

    The gNB sits on its rail (y = gnb_track_y); the UE and obstacle are
    free points / a free rectangle inside the chamber.
    """

    gnb_x: float = 4.0
    ue_x: float = 4.0
    ue_y: float = 3.5
    obstacle_x: float = 4.0
    obstacle_y: float = 1.6
    obstacle_half_x: float = 0.5
    obstacle_half_y: float = 0.2

    def validate(self, chamber: ChamberConfig) -> None:
        if self.obstacle_half_x <= 0 or self.obstacle_half_y <= 0:
            raise ConfigError("obstacle half extents must be positive")
        for label, x, y in (
            ("gnb", self.gnb_x, chamber.gnb_track_y),
            ("ue", self.ue_x, self.ue_y),
            ("obstacle", self.obstacle_x, self.obstacle_y),
        ):
            if not (0 <= x <= chamber.width and 0 <= y <= chamber.depth):
                raise ConfigError(f"{label} initial position outside the chamber")


@dataclass(frozen=True)
class TrainingConfig:
    """DQN hyperparameters, episode layout, and the reward constants."""

    batch_size: int = 64
    learning_rate: float = 0.001
    epsilon_initial: float = 0.9
    epsilon_final: float = 0.1
    discount: float = 0.9
    target_update_every: int = 100
    episodes: int = 3
    episode_step_limit: int = 3000
    reward_gain: float = 0.75
    d_min_map: float = 0.5
    # None means: resolve to the chamber diagonal when the config is loaded
    d_max_map: float | None = None

    def validate(self) -> None:
        if not 0 < self.discount < 1:
            raise ConfigError("discount must be in (0, 1)")
        if not 0 <= self.epsilon_final <= self.epsilon_initial <= 1:
            raise ConfigError("need 0 <= epsilon_final <= epsilon_initial <= 1")
        if self.batch_size <= 0 or self.episodes <= 0 or self.episode_step_limit <= 0:
            raise ConfigError("batch_size, episodes and episode_step_limit must be positive")
        if self.target_update_every <= 0:
            raise ConfigError("target_update_every must be positive")
        if self.reward_gain <= 0:
            raise ConfigError("reward_gain must be positive")
        if self.d_max_map is not None and self.d_max_map <= self.d_min_map:
            raise ConfigError("d_max_map must exceed d_min_map")

    def resolved(self, chamber: ChamberConfig) -> "TrainingConfig":
        """Fill d_max_map with the chamber diagonal when left unset."""
        if self.d_max_map is not None:
            return self
        return replace(self, d_max_map=chamber.diagonal)


@dataclass(frozen=True)
class BridgeConfig:
    """Endpoint and protocol knobs for the external RF emulator link."""

    host: str = "127.0.0.1"
    port: int = 9001
    command_template: str = "channelmod modify {idx} ploss {val}"
    channel_index: int = 0
    min_interval: float = 0.0
    reconnect_backoff: float = 1.0

    def validate(self) -> None:
        if self.command_template.count("{val}") != 1:
            raise ConfigError("command_template must contain exactly one {val} placeholder")
        if self.min_interval < 0:
            raise ConfigError("min_interval must be non-negative")
        if self.reconnect_backoff <= 0:
            raise ConfigError("reconnect_backoff must be positive")


@dataclass(frozen=True)
class EvaluationConfig:
    """Length of the evaluation runs (use cases S/O/U)."""

    run_ticks: int = 75

    def validate(self) -> None:
        if self.run_ticks <= 0:
            raise ConfigError("run_ticks must be positive")


@dataclass(frozen=True)
class AppConfig:
    """Bundle of all configuration sections."""

    chamber: ChamberConfig = field(default_factory=ChamberConfig)
    layout: EntityLayout = field(default_factory=EntityLayout)
    training: TrainingConfig = field(default_factory=TrainingConfig)
    bridge: BridgeConfig = field(default_factory=BridgeConfig)
    evaluation: EvaluationConfig = field(default_factory=EvaluationConfig)

    def validate(self) -> None:
        self.chamber.validate()
        self.layout.validate(self.chamber)
        self.training.validate()
        self.bridge.validate()
        self.evaluation.validate()

    def resolved(self) -> "AppConfig":
        return replace(self, training=self.training.resolved(self.chamber))

    def hash(self) -> str:
        """Short stable digest identifying this configuration."""
        parts = []
        for section_name in ("chamber", "layout", "training", "bridge", "evaluation"):
            section = getattr(self, section_name)
            for f in fields(section):
                parts.append(f"{section_name}.{f.name}={getattr(section, f.name)!r}")
        blob = "\n".join(parts).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


_SECTIONS = {
    "chamber": ChamberConfig,
    "entities": EntityLayout,
    "training": TrainingConfig,
    "bridge": BridgeConfig,
    "evaluation": EvaluationConfig,
}

_FIELD_TO_SECTION_ATTR = {
    "chamber": "chamber",
    "entities": "layout",
    "training": "training",
    "bridge": "bridge",
    "evaluation": "evaluation",
}


def _coerce(raw: str, target_type: type, name: str):
    raw = raw.strip()
    if raw == "":
        return None
    try:
        if target_type is int:
            return int(raw)
        if target_type is float:
            return float(raw)
        if target_type is str:
            return raw
    except ValueError as exc:
        raise ConfigError(f"bad value for {name}: {raw!r}") from exc
    raise ConfigError(f"unsupported config field type for {name}")


def load_config(path: str | Path | None = None) -> AppConfig:
    """Load an AppConfig from an INI file; missing keys keep defaults.

    Unknown sections or keys are rejected so typos do not silently
    fall back to defaults.
    """
    if path is None:
        return AppConfig().resolved()

    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    read = parser.read(str(path))
    if not read:
        raise ConfigError(f"config file not found: {path}")

    sections: dict[str, object] = {}
    for section_name in parser.sections():
        if section_name not in _SECTIONS:
            raise ConfigError(f"unknown config section [{section_name}]")
        cls = _SECTIONS[section_name]
        known = {f.name: f for f in fields(cls)}
        values: dict[str, object] = {}
        for key, raw in parser.items(section_name):
            if key not in known:
                raise ConfigError(f"unknown key {key!r} in section [{section_name}]")
            f = known[key]
            base = f.type if isinstance(f.type, type) else None
            if base is None:
                # dataclass fields carry string annotations under
                # `from __future__ import annotations`
                ann = str(f.type)
                base = int if ann.startswith("int") else str if ann.startswith("str") else float
            coerced = _coerce(raw, base, f"{section_name}.{key}")
            if coerced is not None:
                values[key] = coerced
        sections[_FIELD_TO_SECTION_ATTR[section_name]] = cls(**values)

    cfg = AppConfig(**sections)  # type: ignore[arg-type]
    cfg = cfg.resolved()
    cfg.validate()
    return cfg


def save_config(cfg: AppConfig, path: str | Path) -> None:
    """Write every section and key, so the file doubles as documentation."""
    parser = configparser.ConfigParser()
    for section_name, attr in _FIELD_TO_SECTION_ATTR.items():
        section = getattr(cfg, attr)
        parser[section_name] = {
            f.name: "" if getattr(section, f.name) is None else str(getattr(section, f.name))
            for f in fields(section)
        }
    with open(path, "w") as fh:
        parser.write(fh)


DEFAULT_CONFIG = AppConfig().resolved()
