"""Independent oracles shared by the unit and acceptance suites."""

from dataclasses import replace

import numpy as np

from chambersim.chamber import LOS, NLOS, compute_los


def sampled_los(gnb, ue, obs, n=1000):
    """Brute-force oracle: n evenly spaced points tested for strict containment."""
    if gnb == ue:
        return LOS  # empty open segment
    ts = np.linspace(0.0, 1.0, n)
    xs = gnb[0] + ts * (ue[0] - gnb[0])
    ys = gnb[1] + ts * (ue[1] - gnb[1])
    inside = (np.abs(xs - obs.x) < obs.half_x) & (np.abs(ys - obs.y) < obs.half_y)
    return NLOS if bool(inside.any()) else LOS


def within_tangency_band(gnb, ue, obs, eps=1e-9):
    """True when growing/shrinking the obstacle by eps flips the LoS verdict."""
    grown = compute_los(gnb, ue, replace(obs, half_x=obs.half_x + eps, half_y=obs.half_y + eps))[0]
    shrunk = compute_los(gnb, ue, replace(obs, half_x=max(obs.half_x - eps, eps), half_y=max(obs.half_y - eps, eps)))[0]
    return grown != shrunk


def explain_disagreement(gnb, ue, obs):
    """Classify an exact-vs-sampler disagreement.

    Returns None when the disagreement is excusable: either the
    configuration sits inside the 1e-9 tangency band, or the sparse
    sampler contradicts a 1000x denser sampling of the same segment
    (so the sampler cannot resolve the chord). Otherwise returns a
    human-readable failure description.
    """
    if within_tangency_band(gnb, ue, obs):
        return None
    sparse = sampled_los(gnb, ue, obs, n=1000)
    dense = sampled_los(gnb, ue, obs, n=1_000_001)
    if dense != sparse:
        return None
    return (
        f"compute_los disagrees with the sampler outside the tangency band: "
        f"gnb={gnb} ue={ue} obs=({obs.x}, {obs.y}) half=({obs.half_x}, {obs.half_y})"
    )


def huber_loss_forward_only(net, states, actions, targets):
    """TD batch loss recomputed with plain matmuls (no backprop code path)."""
    rows = np.arange(len(actions))
    a = states
    last = len(net.weights) - 1
    for k, (w, b) in enumerate(zip(net.weights, net.biases)):
        a = a @ w.T + b
        if k < last:
            a = np.maximum(a, 0.0)
    err = a[rows, actions] - targets
    abs_err = np.abs(err)
    return float(np.mean(np.where(abs_err <= 1.0, 0.5 * err * err, abs_err - 0.5)))


def fd_gradients(net, states, actions, targets, h=1e-4):
    """Central finite differences of the batch loss w.r.t. every parameter."""
    grads = []
    for layer in range(len(net.weights)):
        layer_grads = []
        for param in (net.weights[layer], net.biases[layer]):
            g = np.zeros_like(param)
            flat = param.ravel()
            gflat = g.ravel()
            for i in range(flat.size):
                orig = flat[i]
                flat[i] = orig + h
                lp = huber_loss_forward_only(net, states, actions, targets)
                flat[i] = orig - h
                lm = huber_loss_forward_only(net, states, actions, targets)
                flat[i] = orig
                gflat[i] = (lp - lm) / (2.0 * h)
            layer_grads.append(g)
        grads.append(tuple(layer_grads))
    return grads


def _branch_pattern(net, states, actions, targets):
    """ReLU sign pattern per hidden layer plus the Huber branch flags."""
    a = states
    pats = []
    last = len(net.weights) - 1
    for k, (w, b) in enumerate(zip(net.weights, net.biases)):
        a = a @ w.T + b
        if k < last:
            pats.append(a > 0)
            a = a * pats[-1]
    err = a[np.arange(len(actions)), actions] - targets
    return pats, np.abs(err) <= 1.0


def is_kink_crossing(net, layer, which, flat_index, states, actions, targets, h=1e-4):
    """True when perturbing one parameter by +/-h flips a ReLU or Huber branch.

    Central differences are not a derivative estimate across such a
    crossing, so mismatches there carry no information about gradient
    correctness.
    """
    param = net.weights[layer] if which == "w" else net.biases[layer]
    flat = param.ravel()
    orig = flat[flat_index]
    flat[flat_index] = orig + h
    plus = _branch_pattern(net, states, actions, targets)
    flat[flat_index] = orig - h
    minus = _branch_pattern(net, states, actions, targets)
    flat[flat_index] = orig
    relu_same = all(np.array_equal(p, m) for p, m in zip(plus[0], minus[0]))
    return not (relu_same and np.array_equal(plus[1], minus[1]))


def layer_relative_errors(analytic, numeric):
    """Per-layer Frobenius relative error between two gradient lists."""
    errs = []
    for (aw, ab), (nw, nb) in zip(analytic, numeric):
        diff = np.sqrt(np.linalg.norm(aw - nw) ** 2 + np.linalg.norm(ab - nb) ** 2)
        scale = max(np.sqrt(np.linalg.norm(nw) ** 2 + np.linalg.norm(nb) ** 2), 1e-12)
        errs.append(diff / scale)
    return errs


def layer_errors_excluding_kinks(net, analytic, numeric, states, actions, targets, h=1e-4, probe=1e-6):
    """Layer relative errors after dropping verified kink crossings.

    Entries with |fd - analytic| above `probe` are individually checked;
    only entries whose branch pattern provably flips inside [p-h, p+h]
    are excluded. Returns (errors, kinks_excluded, suspects_kept).
    """
    errs = []
    excluded = 0
    kept = 0
    for layer, ((aw, ab), (nw, nb)) in enumerate(zip(analytic, numeric)):
        masked = []
        for which, a_arr, n_arr in (("w", aw, nw), ("b", ab, nb)):
            a_flat = a_arr.ravel().copy()
            n_flat = n_arr.ravel().copy()
            suspects = np.nonzero(np.abs(a_flat - n_flat) > probe)[0]
            for idx in suspects:
                if is_kink_crossing(net, layer, which, int(idx), states, actions, targets, h):
                    a_flat[idx] = 0.0
                    n_flat[idx] = 0.0
                    excluded += 1
                else:
                    kept += 1
            masked.append((a_flat, n_flat))
        diff = np.sqrt(sum(np.linalg.norm(a - n) ** 2 for a, n in masked))
        scale = max(np.sqrt(sum(np.linalg.norm(n) ** 2 for _, n in masked)), 1e-12)
        errs.append(diff / scale)
    return errs, excluded, kept
