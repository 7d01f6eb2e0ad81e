"""The live simulation session behind the control server.

One thread owns every piece of mutable state (world, mode, policy,
trainer). Network sessions talk to it exclusively through queues:
commands in, messages out. Commands are drained between ticks, so their
effects are tick-atomic; every command is answered with exactly one ack
or error carrying its correlation id.

Snapshot fan-out is non-blocking: each client gets a bounded buffer
that drops its oldest entries under backpressure, and drops are
reported to that client in an event message.
"""

from __future__ import annotations

import logging
import queue
import threading
import time
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .agent.dqn import select_action
from .agent.features import ACTION_MAINTAIN, StateScales, apply_action, encode_raw, evaluate_reward, normalize
from .agent.qnet import QNetwork
from .agent.training import TrainingDriver
from .chamber import BounceX, ChamberState, Scripted, Static, advance, default_initial_state, validate_motion
from .config import AppConfig
from .metrics import RunTrace
from .rfbridge import RfBridge
from .scenarios import V_OBJECT, build_use_case

log = logging.getLogger(__name__)

MODES = ("training", "simulation", "live")
DEFAULT_SINK_DEPTH = 256
# velocity commands for the UE / obstacle are sanity-capped at this speed
MAX_OBJECT_COMMAND_SPEED = 2.0

COMMAND_TYPES = (
    "set_velocity",
    "set_motion_model",
    "pause",
    "resume",
    "step_once",
    "set_mode",
    "load_policy",
    "set_action_override",
    "reset_scenario",
)


class CommandError(ValueError):
    """Command rejected; the reason goes back to the issuing client."""


@dataclass
class Command:
    type: str
    payload: dict
    corr_id: Optional[str] = None
    reply_to: Optional["ClientSink"] = None


class ClientSink:
    """Bounded per-client outbox.

    Overflow evicts the oldest *snapshot*; command replies and events are
    never dropped, so every command still gets its ack or error even
    under backpressure. Drops are reported to the client in a
    snapshot_drop event once there is room again.
    """

    def __init__(self, depth: int = DEFAULT_SINK_DEPTH):
        self._buf: list[dict] = []
        self.depth = depth
        self._lock = threading.Lock()
        self._ready = threading.Condition(self._lock)
        self.dropped_total = 0
        self._dropped_unreported = 0
        self.closed = False

    def _evict_one_snapshot(self) -> bool:
        for i, msg in enumerate(self._buf):
            if msg.get("type") == "snapshot":
                del self._buf[i]
                self.dropped_total += 1
                self._dropped_unreported += 1
                return True
        return False

    def put(self, message: dict) -> None:
        with self._lock:
            if self.closed:
                return
            if self._dropped_unreported and len(self._buf) < self.depth:
                self._buf.append(
                    {
                        "type": "event",
                        "name": "snapshot_drop",
                        "detail": {"dropped": self._dropped_unreported, "total_dropped": self.dropped_total},
                    }
                )
                self._dropped_unreported = 0
            if len(self._buf) >= self.depth and not self._evict_one_snapshot():
                if message.get("type") == "snapshot":
                    self.dropped_total += 1
                    self._dropped_unreported += 1
                    return
            self._buf.append(message)
            self._ready.notify()

    def get(self, timeout: Optional[float] = None) -> Optional[dict]:
        with self._lock:
            if not self._buf:
                self._ready.wait(timeout)
            if not self._buf:
                return None
            return self._buf.pop(0)

    def close(self) -> None:
        with self._lock:
            self.closed = True
            self._ready.notify_all()


def snapshot_of(
    state: ChamberState,
    tick: int,
    mode: str,
    reward: float,
    last_action: Optional[int],
    epsilon: Optional[float],
) -> dict:
    """Lossless, field-order-stable projection of the world state."""
    entities = []
    for entity in state.entities:
        entities.append(
            {
                "id": entity.kind.value,
                "kind": entity.kind.name,
                "position": [entity.x, entity.y],
                "velocity": [entity.vx, entity.vy],
                "half_size": [entity.half_x, entity.half_y],
            }
        )
    return {
        "type": "snapshot",
        "tick": tick,
        "entities": entities,
        "los": state.los,
        "path_loss": state.path_loss,
        "d_ue": state.d_ue,
        "reward": reward,
        "last_action": last_action,
        "mode": mode,
        "epsilon": epsilon,
    }


class SimulationSession:
    """Owns the world and serves ticks; see module docstring for contracts."""

    def __init__(
        self,
        app: AppConfig,
        mode: str = "simulation",
        policy: Optional[QNetwork] = None,
        use_case: Optional[str] = None,
        bridge: Optional[RfBridge] = None,
        seed: int = 0,
        realtime: bool = False,
        max_ticks: Optional[int] = None,
        trace: Optional[RunTrace] = None,
    ):
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}")
        if mode == "live" and bridge is None:
            raise CommandError("bridge not configured")
        app.validate()
        self.app = app
        self.cfg = app.chamber
        self.tc = app.training.resolved(app.chamber)
        self.scales = StateScales.from_config(self.cfg, v_obj_max=V_OBJECT)
        self.mode = mode
        self.policy = policy
        self.bridge = bridge
        self.seed = seed
        self.realtime = realtime
        self.max_ticks = max_ticks
        self.trace = trace
        self.use_case = use_case

        self.trainer: Optional[TrainingDriver] = None
        if mode == "training":
            self.trainer = TrainingDriver(app, seed)
            self.state = self.trainer.state
        elif use_case is not None:
            self.state = build_use_case(use_case, self.cfg, app.layout)
        else:
            self.state = default_initial_state(self.cfg, app.layout)

        self.tick = 0  # session tick, monotonic even across scenario resets
        self.paused = False
        self._step_credits = 0
        self._override: Optional[int] = None
        self._commands: "queue.Queue[Command]" = queue.Queue()
        self._sinks: list[ClientSink] = []
        self._sinks_lock = threading.Lock()
        self._stop = threading.Event()
        self._thread: Optional[threading.Thread] = None
        self._greedy_rng = np.random.default_rng(0)  # epsilon 0: never drawn from
        self._last_scenario: Optional[str] = None
        self.tick_wall_times: list[float] = []  # monotonic stamps, realtime runs

        if trace is not None:
            reward0 = evaluate_reward(self.state, self.tc)
            trace.append_state(self.state, ACTION_MAINTAIN, reward0)

    # -- client plumbing ---------------------------------------------------

    def register_sink(self, depth: int = DEFAULT_SINK_DEPTH) -> ClientSink:
        sink = ClientSink(depth)
        # greet every client with the static facts a renderer needs
        sink.put(
            {
                "type": "event",
                "name": "hello",
                "tick": self.tick,
                "detail": {
                    "chamber": {
                        "width": self.cfg.width,
                        "depth": self.cfg.depth,
                        "gnb_track_y": self.cfg.gnb_track_y,
                        "tick": self.cfg.tick,
                        "nlos_attenuation": self.cfg.nlos_attenuation,
                        "v_gnb_max": self.cfg.v_gnb_max,
                        "velocity_step": self.cfg.velocity_step,
                    },
                    "reward_gain": self.tc.reward_gain,
                    "mode": self.mode,
                    "use_cases": ["S", "O.1", "O.2", "U.1", "U.2"],
                },
            }
        )
        with self._sinks_lock:
            self._sinks.append(sink)
        return sink

    def unregister_sink(self, sink: ClientSink) -> None:
        sink.close()
        with self._sinks_lock:
            if sink in self._sinks:
                self._sinks.remove(sink)

    def submit(self, command: Command) -> None:
        self._commands.put(command)

    def _broadcast(self, message: dict) -> None:
        with self._sinks_lock:
            sinks = list(self._sinks)
        for sink in sinks:
            sink.put(message)

    def _emit_event(self, name: str, detail: dict) -> None:
        self._broadcast({"type": "event", "name": name, "tick": self.tick, "detail": detail})

    # -- command application -------------------------------------------------

    def _entity_by_id(self, entity_id: str):
        mapping = {"gnb": self.state.gnb, "ue": self.state.ue, "obstacle": self.state.obstacle}
        if entity_id not in mapping:
            raise CommandError(f"unknown entity {entity_id!r}")
        return mapping[entity_id]

    def _replace_entity(self, entity_id: str, entity) -> None:
        self.state = replace(self.state, **{entity_id: entity})

    def _apply_set_velocity(self, payload: dict) -> None:
        entity_id = payload.get("entity")
        vx = float(payload.get("vx", 0.0))
        vy = float(payload.get("vy", 0.0))
        entity = self._entity_by_id(entity_id)
        if vy != 0.0:
            raise CommandError("only horizontal velocities are supported")
        if entity_id == "gnb":
            if abs(vx) > self.cfg.v_gnb_max:
                raise CommandError(f"|vx| exceeds v_gnb_max={self.cfg.v_gnb_max}")
            self._replace_entity("gnb", replace(entity, vx=vx))
            return
        if abs(vx) > MAX_OBJECT_COMMAND_SPEED:
            raise CommandError(f"|vx| exceeds object speed cap {MAX_OBJECT_COMMAND_SPEED}")
        if vx == 0.0:
            motion = Static()
        else:
            margin = entity.half_x
            motion = BounceX(speed=abs(vx), min_x=margin, max_x=self.cfg.width - margin)
        self._replace_entity(entity_id, replace(entity, vx=vx, vy=0.0, motion=motion))

    def _apply_set_motion_model(self, payload: dict) -> None:
        entity_id = payload.get("entity")
        entity = self._entity_by_id(entity_id)
        if entity_id == "gnb":
            raise CommandError("the gNB motion model is owned by the controller")
        model = payload.get("model")
        if model == "static":
            motion, vx = Static(), 0.0
        elif model == "bounce":
            motion = BounceX(
                speed=float(payload["speed"]),
                min_x=float(payload.get("min_x", entity.half_x)),
                max_x=float(payload.get("max_x", self.cfg.width - entity.half_x)),
            )
            vx = float(payload.get("direction", 1.0)) * motion.speed
        elif model == "scripted":
            waypoints = tuple((float(t), float(x), float(y)) for t, x, y in payload["waypoints"])
            motion, vx = Scripted(waypoints), 0.0
        else:
            raise CommandError(f"unknown motion model {model!r}")
        try:
            validate_motion(motion, self.cfg)
        except ValueError as exc:
            raise CommandError(str(exc)) from exc
        self._replace_entity(entity_id, replace(entity, vx=vx, vy=0.0, motion=motion))

    def _apply_set_mode(self, payload: dict) -> None:
        mode = payload.get("mode")
        if mode not in MODES:
            raise CommandError(f"unknown mode {mode!r}")
        if mode == "live" and self.bridge is None:
            raise CommandError("bridge not configured")
        if mode == "training" and self.trainer is None:
            self.trainer = TrainingDriver(self.app, self.seed)
            self.state = self.trainer.state
        self.mode = mode

    def _apply_command(self, cmd: Command) -> None:
        if cmd.type == "set_velocity":
            self._apply_set_velocity(cmd.payload)
        elif cmd.type == "set_motion_model":
            self._apply_set_motion_model(cmd.payload)
        elif cmd.type == "pause":
            self.paused = True
        elif cmd.type == "resume":
            self.paused = False
            self._step_credits = 0
        elif cmd.type == "step_once":
            if not self.paused:
                raise CommandError("step_once requires the session to be paused")
            self._step_credits += 1
        elif cmd.type == "set_mode":
            self._apply_set_mode(cmd.payload)
        elif cmd.type == "load_policy":
            try:
                self.policy = QNetwork.load(cmd.payload["path"])
            except (OSError, KeyError, ValueError) as exc:
                raise CommandError(f"cannot load policy: {exc}") from exc
        elif cmd.type == "set_action_override":
            action = cmd.payload.get("action")
            if action not in (0, 1, 2):
                raise CommandError(f"unknown action id {action!r}")
            self._override = int(action)
        elif cmd.type == "reset_scenario":
            name = cmd.payload.get("use_case", self.use_case)
            if name is not None:
                self.state = build_use_case(name, self.cfg, self.app.layout)
                self.use_case = name
            else:
                self.state = default_initial_state(self.cfg, self.app.layout)
        else:
            raise CommandError(f"unknown command type {cmd.type!r}")

    def _answer(self, cmd: Command, error: Optional[str]) -> None:
        if cmd.reply_to is None:
            if error is not None:
                log.warning("command %s failed: %s", cmd.type, error)
            return
        if error is None:
            cmd.reply_to.put({"type": "ack", "id": cmd.corr_id, "command": cmd.type})
        else:
            cmd.reply_to.put({"type": "error", "id": cmd.corr_id, "reason": error})

    def _drain_commands(self, block_s: Optional[float] = None) -> None:
        try:
            cmd = self._commands.get(timeout=block_s) if block_s else self._commands.get_nowait()
        except queue.Empty:
            return
        while True:
            try:
                self._apply_command(cmd)
                self._answer(cmd, None)
            except CommandError as exc:
                self._answer(cmd, str(exc))
            try:
                cmd = self._commands.get_nowait()
            except queue.Empty:
                return

    # -- the tick loop -------------------------------------------------------

    def _take_override(self) -> Optional[int]:
        action, self._override = self._override, None
        return action

    def _run_one_tick(self) -> None:
        epsilon: Optional[float] = None
        if self.mode == "training" and self.trainer is not None:
            record = self.trainer.step(forced_action=self._take_override())
            if record is None:
                self.policy = self.trainer.net
                self.mode = "simulation"
                self._emit_event("training_complete", {"episodes": self.trainer.tc.episodes})
                return
            self.state = self.trainer.state
            action, reward, epsilon = record.action, record.reward, record.epsilon
            if record.scenario != self._last_scenario:
                if self._last_scenario is not None:
                    self._emit_event("scenario_transition", {"scenario": record.scenario})
                self._last_scenario = record.scenario
        else:
            action = self._take_override()
            if action is None:
                if self.policy is not None:
                    s_norm = normalize(encode_raw(self.state), self.scales)
                    action = select_action(self.policy, s_norm, 0.0, self._greedy_rng)
                else:
                    action = ACTION_MAINTAIN
            velocity = apply_action(self.state.gnb.vx, action, self.cfg)
            self.state = advance(self.state, velocity, self.cfg)
            reward = evaluate_reward(self.state, self.tc)

        self.tick += 1
        if self.trace is not None:
            self.trace.append_state(self.state, action, reward)
        if self.mode == "live" and self.bridge is not None:
            self.bridge.push(self.state.path_loss, self.tick)
        self._broadcast(snapshot_of(self.state, self.tick, self.mode, reward, action, epsilon))

    def _on_bridge_give_up(self) -> None:
        # called from the bridge worker thread: flip to simulation mode
        # at the next tick boundary via the command queue
        log.warning("RF bridge unreachable; live mode degrades to simulation")
        self.submit(Command(type="set_mode", payload={"mode": "simulation"}))
        self._emit_event("bridge_status", {"status": "unreachable", "degraded": True})

    def run(self) -> None:
        """Tick until stopped or max_ticks is reached."""
        if self.bridge is not None:
            self.bridge.on_give_up = self._on_bridge_give_up
        next_deadline = time.monotonic() + self.cfg.tick
        while not self._stop.is_set():
            if self.max_ticks is not None and self.tick >= self.max_ticks:
                break
            if self.paused and self._step_credits == 0:
                self._drain_commands(block_s=0.05)
                next_deadline = time.monotonic() + self.cfg.tick
                continue
            self._drain_commands()
            if self.paused:
                if self._step_credits == 0:
                    continue
                self._step_credits -= 1
            self._run_one_tick()
            if self.realtime:
                now = time.monotonic()
                delay = next_deadline - now
                if delay > 0:
                    time.sleep(delay)
                self.tick_wall_times.append(time.monotonic())
                next_deadline += self.cfg.tick
                if next_deadline < time.monotonic() - self.cfg.tick:
                    next_deadline = time.monotonic() + self.cfg.tick

    def start(self) -> "SimulationSession":
        self._thread = threading.Thread(target=self.run, name="simulation", daemon=True)
        self._thread.start()
        return self

    def stop(self, timeout: float = 10.0) -> None:
        self._stop.set()
        if self._thread is not None:
            self._thread.join(timeout)

    def join(self, timeout: Optional[float] = None) -> None:
        if self._thread is not None:
            self._thread.join(timeout)
