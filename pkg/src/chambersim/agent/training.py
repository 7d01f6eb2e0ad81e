"""Episode-structured DQN training over the scenario schedule.

One tick: encode the world, pick an epsilon-greedy action, apply it to
the gNB velocity, advance the chamber, score the new state, store the
transition, take one gradient step, and periodically refresh the target
network. Exploration decays linearly across all episodes. Everything
is driven by a single seeded generator, so a (seed, config) pair fully
determines the training run.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from ..chamber import ChamberState, advance
from ..config import AppConfig
from ..scenarios import (
    V_OBJECT,
    build_scenario,
    episode_initial_state,
    instantiate_scenario,
    scenario_id_at,
    scenario_starts,
)
from .dqn import REPLAY_CAPACITY, ReplayBuffer, Transition, epsilon_at, select_action, sync_target, train_step
from .features import StateScales, apply_action, encode_raw, evaluate_reward, normalize
from .qnet import Adam, QNetwork

TRAINING_LOG_COLUMNS = ("step", "episode", "scenario", "epsilon", "action", "reward", "loss", "los", "path_loss")


@dataclass(frozen=True)
class TickRecord:
    step: int
    episode: int
    scenario: str
    epsilon: float
    action: int
    reward: float
    loss: Optional[float]
    los: int
    path_loss: float


@dataclass
class TrainingLog:
    rows: list[TickRecord] = field(default_factory=list)

    def episode_returns(self) -> list[float]:
        sums: dict[int, float] = {}
        for r in self.rows:
            sums[r.episode] = sums.get(r.episode, 0.0) + r.reward
        return [sums[ep] for ep in sorted(sums)]

    def episode_mean_rewards(self) -> list[float]:
        sums: dict[int, list[float]] = {}
        for r in self.rows:
            sums.setdefault(r.episode, []).append(r.reward)
        return [float(np.mean(sums[ep])) for ep in sorted(sums)]

    def to_csv(self) -> str:
        lines = [",".join(TRAINING_LOG_COLUMNS)]
        for r in self.rows:
            loss = "" if r.loss is None else repr(r.loss)
            lines.append(
                f"{r.step},{r.episode},{r.scenario},{r.epsilon!r},{r.action},"
                f"{r.reward!r},{loss},{r.los},{r.path_loss!r}"
            )
        return "\n".join(lines) + "\n"

    def write_csv(self, path: str | Path) -> None:
        Path(path).write_text(self.to_csv())


class TrainingDriver:
    """Stepwise trainer; call step() once per tick until it returns None."""

    def __init__(self, app: AppConfig, seed: int):
        app.validate()
        self.app = app
        self.cfg = app.chamber
        self.tc = app.training.resolved(app.chamber)
        self.seed = seed
        self.rng = np.random.default_rng(seed)
        self.net = QNetwork.initialized(self.rng)
        self.target = self.net.copy()
        self.optimizer = Adam(self.net, lr=self.tc.learning_rate)
        self.buffer = ReplayBuffer(REPLAY_CAPACITY)
        self.scales = StateScales.from_config(self.cfg, v_obj_max=V_OBJECT)
        self.total_steps = self.tc.episodes * self.tc.episode_step_limit
        self.global_step = 0
        self.episode = 1
        self.step_in_episode = 0
        self._boundaries = scenario_starts()
        self.state: ChamberState = episode_initial_state(self.cfg, app.layout)
        self.log = TrainingLog()

    @property
    def done(self) -> bool:
        return self.global_step >= self.total_steps

    def step(self, forced_action: Optional[int] = None) -> Optional[TickRecord]:
        """Advance one training tick; None once the schedule is exhausted.

        forced_action bypasses the epsilon-greedy choice for this tick
        (operator override); the transition is still learned from.
        """
        if self.done:
            return None

        if self.step_in_episode == 0 and self.global_step > 0:
            self.state = episode_initial_state(self.cfg, self.app.layout)
        elif self.step_in_episode in self._boundaries and self.step_in_episode > 0:
            spec = build_scenario(
                self._boundaries[self.step_in_episode], self.cfg, self.app.layout,
                variant=self.episode - 1,
            )
            self.state = instantiate_scenario(spec, self.state, self.cfg)

        scenario = scenario_id_at(self.step_in_episode)
        eps = epsilon_at(self.global_step, self.tc, self.total_steps)
        s_norm = normalize(encode_raw(self.state), self.scales)
        if forced_action is not None:
            action = forced_action
        else:
            action = select_action(self.net, s_norm, eps, self.rng)
        velocity = apply_action(self.state.gnb.vx, action, self.cfg)
        next_state = advance(self.state, velocity, self.cfg)
        reward = evaluate_reward(next_state, self.tc)
        done = self.step_in_episode == self.tc.episode_step_limit - 1
        s_next_norm = normalize(encode_raw(next_state), self.scales)
        self.buffer.push(Transition(s_norm, action, reward, s_next_norm, done))

        loss = train_step(self.net, self.target, self.buffer, self.tc, self.optimizer, self.rng)

        self.state = next_state
        self.global_step += 1
        self.step_in_episode += 1
        if self.global_step % self.tc.target_update_every == 0:
            sync_target(self.net, self.target)

        record = TickRecord(
            step=self.global_step - 1,
            episode=self.episode,
            scenario=scenario,
            epsilon=eps,
            action=action,
            reward=reward,
            loss=loss,
            los=next_state.los,
            path_loss=next_state.path_loss,
        )
        self.log.rows.append(record)

        if done:
            self.episode += 1
            self.step_in_episode = 0
        return record


@dataclass
class TrainingResult:
    policy: QNetwork
    log: TrainingLog
    episode_returns: list[float]
    episode_mean_rewards: list[float]
    seed: int


def run_training(
    app: AppConfig,
    seed: int,
    policy_path: str | Path | None = None,
    log_path: str | Path | None = None,
    checkpoint_path: str | Path | None = None,
    progress: Callable[[TickRecord], None] | None = None,
) -> TrainingResult:
    """Train to completion; persists the policy/log when paths are given.

    An interrupt still writes a checkpoint of the partially trained
    network before propagating.
    """
    driver = TrainingDriver(app, seed)
    try:
        while True:
            record = driver.step()
            if record is None:
                break
            if progress is not None:
                progress(record)
    except KeyboardInterrupt:
        if checkpoint_path is not None:
            driver.net.save(checkpoint_path)
        raise

    if policy_path is not None:
        driver.net.save(policy_path)
    if log_path is not None:
        driver.log.write_csv(log_path)
    return TrainingResult(
        policy=driver.net,
        log=driver.log,
        episode_returns=driver.log.episode_returns(),
        episode_mean_rewards=driver.log.episode_mean_rewards(),
        seed=seed,
    )
