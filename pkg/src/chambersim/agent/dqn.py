"""Replay buffer, exploration schedule, action selection, and the TD update."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from ..config import TrainingConfig
from .qnet import Adam, QNetwork, td_loss_and_grads

REPLAY_CAPACITY = 1000


@dataclass(frozen=True)
class Transition:
    state: np.ndarray
    action: int
    reward: float
    next_state: np.ndarray
    done: bool


class ReplayBuffer:
    """FIFO ring of transitions; insertion beyond capacity evicts the oldest."""

    def __init__(self, capacity: int = REPLAY_CAPACITY):
        if capacity <= 0:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self._buf: deque[Transition] = deque(maxlen=capacity)

    def push(self, t: Transition) -> None:
        self._buf.append(t)

    def __len__(self) -> int:
        return len(self._buf)

    def __iter__(self):
        return iter(self._buf)

    def sample(self, n: int, rng: np.random.Generator):
        """Uniform sample without replacement as stacked arrays."""
        idx = rng.choice(len(self._buf), size=n, replace=False)
        picked = [self._buf[i] for i in idx]
        states = np.stack([t.state for t in picked])
        actions = np.array([t.action for t in picked], dtype=np.int64)
        rewards = np.array([t.reward for t in picked], dtype=np.float64)
        next_states = np.stack([t.next_state for t in picked])
        dones = np.array([t.done for t in picked], dtype=bool)
        return states, actions, rewards, next_states, dones


def epsilon_at(global_step: int, tc: TrainingConfig, total_steps: int) -> float:
    """Linear ramp from epsilon_initial at step 0 to epsilon_final at total_steps."""
    if global_step < 0:
        raise ValueError("global_step must be non-negative")
    if total_steps <= 0 or global_step >= total_steps:
        return tc.epsilon_final
    frac = global_step / total_steps
    return tc.epsilon_initial + frac * (tc.epsilon_final - tc.epsilon_initial)


def select_action(net: QNetwork, s_norm: np.ndarray, epsilon: float, rng: np.random.Generator) -> int:
    """Epsilon-greedy; greedy ties resolve to the lowest action id."""
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError("epsilon must be a probability")
    if epsilon > 0.0 and rng.random() < epsilon:
        return int(rng.integers(3))
    return int(np.argmax(net.forward(s_norm)))


def td_targets(
    target_net: QNetwork,
    rewards: np.ndarray,
    next_states: np.ndarray,
    dones: np.ndarray,
    gamma: float,
) -> np.ndarray:
    """y = r + gamma * max_a' Q_target(s', a'), truncated on terminal steps."""
    next_q = target_net.forward(next_states).max(axis=1)
    return rewards + gamma * next_q * ~dones


def train_step(
    net: QNetwork,
    target_net: QNetwork,
    buffer: ReplayBuffer,
    tc: TrainingConfig,
    optimizer: Adam,
    rng: np.random.Generator,
) -> float | None:
    """One gradient step on a uniform minibatch; None while the buffer is cold."""
    if len(buffer) < tc.batch_size:
        return None
    states, actions, rewards, next_states, dones = buffer.sample(tc.batch_size, rng)
    targets = td_targets(target_net, rewards, next_states, dones, tc.discount)
    loss, grads = td_loss_and_grads(net, states, actions, targets)
    optimizer.step(grads)
    return loss


def sync_target(net: QNetwork, target_net: QNetwork) -> None:
    """Make the target an exact copy of the online network."""
    target_net.load_from(net)
