"""Feed-forward Q-value network with explicit backprop and Adam.

The network maps the 11-feature observation to 3 action values through
three ReLU hidden layers (64, 128, 64). Everything is float64 numpy:
the model is small enough that hand-written gradients are both faster
to load and exactly reproducible, and they can be checked against
finite differences without framework noise.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

LAYER_SIZES = (11, 64, 128, 64, 3)

POLICY_FORMAT_VERSION = 1


class QNetwork:
    """Affine/ReLU stack; hidden layers ReLU, output layer linear."""

    def __init__(self, weights: list[np.ndarray], biases: list[np.ndarray]):
        expected = list(zip(LAYER_SIZES[1:], LAYER_SIZES[:-1]))
        shapes = [w.shape for w in weights]
        if shapes != expected or [b.shape for b in biases] != [(n,) for n, _ in expected]:
            raise ValueError(f"bad layer shapes {shapes}, expected {expected}")
        self.weights = [np.asarray(w, dtype=np.float64) for w in weights]
        self.biases = [np.asarray(b, dtype=np.float64) for b in biases]

    @classmethod
    def initialized(cls, rng: np.random.Generator) -> "QNetwork":
        """Fresh network, uniform weights in +/- 1/sqrt(fan_in) per layer."""
        weights, biases = [], []
        for fan_in, fan_out in zip(LAYER_SIZES[:-1], LAYER_SIZES[1:]):
            bound = 1.0 / np.sqrt(fan_in)
            weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
            biases.append(rng.uniform(-bound, bound, size=fan_out))
        return cls(weights, biases)

    @classmethod
    def zeros(cls) -> "QNetwork":
        weights = [np.zeros((o, i)) for i, o in zip(LAYER_SIZES[:-1], LAYER_SIZES[1:])]
        biases = [np.zeros(o) for o in LAYER_SIZES[1:]]
        return cls(weights, biases)

    def num_parameters(self) -> int:
        return sum(w.size + b.size for w, b in zip(self.weights, self.biases))

    def forward(self, x: np.ndarray) -> np.ndarray:
        """Q-values for one observation (11,) or a batch (n, 11)."""
        x = np.asarray(x, dtype=np.float64)
        if not np.all(np.isfinite(x)):
            raise ValueError("non-finite network input")
        a = np.atleast_2d(x)
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            a = a @ w.T + b
            if i < last:
                np.maximum(a, 0.0, out=a)
        return a[0] if x.ndim == 1 else a

    def copy(self) -> "QNetwork":
        return QNetwork([w.copy() for w in self.weights], [b.copy() for b in self.biases])

    def load_from(self, other: "QNetwork") -> None:
        """In-place parameter copy (target network sync)."""
        for dst, src in zip(self.weights, other.weights):
            if dst.shape != src.shape:
                raise ValueError("network shape mismatch")
            dst[...] = src
        for dst, src in zip(self.biases, other.biases):
            dst[...] = src

    # -- persistence ------------------------------------------------------

    def save(self, path: str | Path) -> None:
        doc = {
            "format_version": POLICY_FORMAT_VERSION,
            "layers": [
                {
                    "inputs": int(w.shape[1]),
                    "outputs": int(w.shape[0]),
                    "weights": [float(v) for v in w.ravel(order="C")],
                    "bias": [float(v) for v in b],
                }
                for w, b in zip(self.weights, self.biases)
            ],
        }
        Path(path).write_text(json.dumps(doc))

    @classmethod
    def load(cls, path: str | Path) -> "QNetwork":
        doc = json.loads(Path(path).read_text())
        if doc.get("format_version") != POLICY_FORMAT_VERSION:
            raise ValueError(f"unsupported policy format: {doc.get('format_version')!r}")
        weights, biases = [], []
        for layer in doc["layers"]:
            n_in, n_out = layer["inputs"], layer["outputs"]
            w = np.array(layer["weights"], dtype=np.float64).reshape(n_out, n_in)
            b = np.array(layer["bias"], dtype=np.float64)
            weights.append(w)
            biases.append(b)
        return cls(weights, biases)


def td_loss_and_grads(
    net: QNetwork,
    states: np.ndarray,
    actions: np.ndarray,
    targets: np.ndarray,
) -> tuple[float, list[tuple[np.ndarray, np.ndarray]]]:
    """Huber loss between Q(s, a) and the TD targets, plus its gradients.

    Returns (loss, [(dW, db) per layer]). The Huber transition point is
    at unit error (smooth-L1).
    """
    states = np.asarray(states, dtype=np.float64)
    actions = np.asarray(actions, dtype=np.int64)
    targets = np.asarray(targets, dtype=np.float64)
    n = states.shape[0]

    # forward pass, caching activations for the backward sweep
    acts = [states]
    relu_masks = []
    a = states
    last = len(net.weights) - 1
    for i, (w, b) in enumerate(zip(net.weights, net.biases)):
        z = a @ w.T + b
        if i < last:
            mask = z > 0
            a = z * mask
            relu_masks.append(mask)
        else:
            a = z
        acts.append(a)

    q = acts[-1]
    rows = np.arange(n)
    err = q[rows, actions] - targets
    abs_err = np.abs(err)
    quadratic = abs_err <= 1.0
    loss = float(np.mean(np.where(quadratic, 0.5 * err * err, abs_err - 0.5)))

    g = np.zeros_like(q)
    g[rows, actions] = np.clip(err, -1.0, 1.0) / n

    grads: list[tuple[np.ndarray, np.ndarray]] = [None] * len(net.weights)  # type: ignore[list-item]
    for i in range(last, -1, -1):
        grads[i] = (g.T @ acts[i], g.sum(axis=0))
        if i > 0:
            g = (g @ net.weights[i]) * relu_masks[i - 1]
    return loss, grads


class Adam:
    """Adaptive-moment optimizer over a QNetwork's parameters."""

    def __init__(self, net: QNetwork, lr: float, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.net = net
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self._m = [np.zeros_like(p) for p in net.weights + net.biases]
        self._v = [np.zeros_like(p) for p in net.weights + net.biases]

    def step(self, grads: list[tuple[np.ndarray, np.ndarray]]) -> None:
        self.t += 1
        params = self.net.weights + self.net.biases
        flat_grads = [g for g, _ in grads] + [g for _, g in grads]
        b1c = 1.0 - self.beta1**self.t
        b2c = 1.0 - self.beta2**self.t
        for p, g, m, v in zip(params, flat_grads, self._m, self._v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p -= self.lr * (m / b1c) / (np.sqrt(v / b2c) + self.eps)
