"""Weighted message-passing network over per-video star graphs, exporting a
16-unit pooled feature vector and a clickbait probability."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .visual_disparity import DisparityGraph

PENULTIMATE_UNITS = 16
INIT_SCALE = 0.05
MOMENTUM = 0.9

DEFAULT_HIDDEN = 32
DEFAULT_LR = 0.05
DEFAULT_EPOCHS = 120
DEFAULT_SEED = 0


class SingleClassError(ValueError):
    pass


@dataclass
class GraphNetParams:
    w_in: np.ndarray  # (input_dim, h)
    b_in: np.ndarray  # (h,)
    w_self: list[np.ndarray]  # two (h, h) matrices
    w_nbr: list[np.ndarray]  # two (h, h) matrices
    b_msg: list[np.ndarray]  # two (h,) biases
    w_read: np.ndarray  # (h, 16)
    b_read: np.ndarray  # (16,)
    w_out: np.ndarray  # (16, 2)
    b_out: np.ndarray  # (2,)
    hidden: int = DEFAULT_HIDDEN
    lr: float = DEFAULT_LR
    epochs: int = DEFAULT_EPOCHS
    seed: int = DEFAULT_SEED

    def flat(self) -> list[np.ndarray]:
        return [
            self.w_in,
            self.b_in,
            *self.w_self,
            *self.w_nbr,
            *self.b_msg,
            self.w_read,
            self.b_read,
            self.w_out,
            self.b_out,
        ]


@dataclass
class GraphNetOutput:
    penultimate: np.ndarray  # (16,)
    logits: np.ndarray  # (2,)
    probability: float


@dataclass
class _Batch:
    """All graphs flattened into one node table for vectorized passes."""

    features: np.ndarray  # (total_nodes, input_dim)
    src: np.ndarray  # (total_edges,) message source node ids
    dst: np.ndarray  # (total_edges,) message destination node ids
    edge_w: np.ndarray  # (total_edges,)
    graph_of: np.ndarray  # (total_nodes,) graph index per node
    node_count: np.ndarray  # (n_graphs,)
    n_graphs: int = field(default=0)


def _pack(graphs: list[DisparityGraph]) -> _Batch:
    feats = []
    src: list[np.ndarray] = []
    dst: list[np.ndarray] = []
    edge_w: list[np.ndarray] = []
    graph_of = []
    node_count = []
    offset = 0
    for gi, g in enumerate(graphs):
        k = g.child_count
        feats.append(g.root[None, :])
        feats.append(g.children)
        n = k + 1
        root = offset
        kids = np.arange(offset + 1, offset + 1 + k)
        # Stored direction root→child plus the reverse, same weight.
        src.append(np.concatenate([np.full(k, root), kids]))
        dst.append(np.concatenate([kids, np.full(k, root)]))
        edge_w.append(np.concatenate([g.weights, g.weights]))
        graph_of.append(np.full(n, gi))
        node_count.append(n)
        offset += n
    return _Batch(
        features=np.concatenate(feats, axis=0),
        src=np.concatenate(src).astype(np.int64),
        dst=np.concatenate(dst).astype(np.int64),
        edge_w=np.concatenate(edge_w),
        graph_of=np.concatenate(graph_of).astype(np.int64),
        node_count=np.asarray(node_count, dtype=np.float64),
        n_graphs=len(graphs),
    )


def init_params(
    input_dim: int,
    hidden: int = DEFAULT_HIDDEN,
    lr: float = DEFAULT_LR,
    epochs: int = DEFAULT_EPOCHS,
    seed: int = DEFAULT_SEED,
) -> GraphNetParams:
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(901,)))

    def u(*shape: int) -> np.ndarray:
        return rng.uniform(-INIT_SCALE, INIT_SCALE, size=shape)

    return GraphNetParams(
        w_in=u(input_dim, hidden),
        b_in=u(hidden),
        w_self=[u(hidden, hidden), u(hidden, hidden)],
        w_nbr=[u(hidden, hidden), u(hidden, hidden)],
        b_msg=[u(hidden), u(hidden)],
        w_read=u(hidden, PENULTIMATE_UNITS),
        b_read=u(PENULTIMATE_UNITS),
        w_out=u(PENULTIMATE_UNITS, 2),
        b_out=u(2),
        hidden=hidden,
        lr=lr,
        epochs=epochs,
        seed=seed,
    )


def _scatter_sum(values: np.ndarray, index: np.ndarray, size: int) -> np.ndarray:
    out = np.zeros((size, values.shape[1]), dtype=values.dtype)
    np.add.at(out, index, values)
    return out


def _forward_batch(batch: _Batch, params: GraphNetParams, keep: bool = False):
    """Penultimate/logits for every graph; optionally keeps activations for
    the backward pass."""
    n_nodes = batch.features.shape[0]
    h = batch.features @ params.w_in + params.b_in
    layer_in = [h]
    pre_acts = []
    for layer in range(2):
        msg = (h @ params.w_nbr[layer])[batch.src] * batch.edge_w[:, None]
        agg = _scatter_sum(msg, batch.dst, n_nodes)
        z = h @ params.w_self[layer] + agg + params.b_msg[layer]
        h = np.maximum(z, 0.0)
        pre_acts.append(z)
        layer_in.append(h)
    pooled = (
        _scatter_sum(h, batch.graph_of, batch.n_graphs) / batch.node_count[:, None]
    )
    pen_pre = pooled @ params.w_read + params.b_read
    pen = np.tanh(pen_pre)
    logits = pen @ params.w_out + params.b_out
    if keep:
        return logits, pen, {
            "layer_in": layer_in,
            "pre_acts": pre_acts,
            "pooled": pooled,
            "pen": pen,
        }
    return logits, pen, None


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def gcn_forward(graph: DisparityGraph, params: GraphNetParams) -> GraphNetOutput:
    logits, pen, _ = _forward_batch(_pack([graph]), params)
    prob = float(_softmax(logits)[0, 1])
    return GraphNetOutput(penultimate=pen[0], logits=logits[0], probability=prob)


def gcn_features(graphs: list[DisparityGraph], params: GraphNetParams) -> np.ndarray:
    """Penultimate vectors for many graphs at once, one row per graph."""
    if not graphs:
        return np.zeros((0, PENULTIMATE_UNITS))
    _, pen, _ = _forward_batch(_pack(graphs), params)
    return pen


def gcn_probabilities(graphs: list[DisparityGraph], params: GraphNetParams) -> np.ndarray:
    if not graphs:
        return np.zeros(0)
    logits, _, _ = _forward_batch(_pack(graphs), params)
    return _softmax(logits)[:, 1]


def _loss_and_grads(batch: _Batch, labels: np.ndarray, params: GraphNetParams):
    logits, _, cache = _forward_batch(batch, params, keep=True)
    n = batch.n_graphs
    probs = _softmax(logits)
    # Mean cross-entropy over graphs on the two-way softmax.
    eps_free = np.clip(probs[np.arange(n), labels], 1e-300, None)
    loss = float(-np.mean(np.log(eps_free)))

    d_logits = probs.copy()
    d_logits[np.arange(n), labels] -= 1.0
    d_logits /= n

    pen = cache["pen"]
    g_w_out = pen.T @ d_logits
    g_b_out = d_logits.sum(axis=0)
    d_pen = d_logits @ params.w_out.T
    d_pen_pre = d_pen * (1.0 - pen * pen)
    pooled = cache["pooled"]
    g_w_read = pooled.T @ d_pen_pre
    g_b_read = d_pen_pre.sum(axis=0)
    d_pooled = d_pen_pre @ params.w_read.T
    # Mean pooling spreads each graph gradient evenly over its nodes.
    d_h = d_pooled[batch.graph_of] / batch.node_count[batch.graph_of][:, None]

    g_w_self = [np.empty(0)] * 2
    g_w_nbr = [np.empty(0)] * 2
    g_b_msg = [np.empty(0)] * 2
    n_nodes = batch.features.shape[0]
    for layer in (1, 0):
        d_z = d_h * (cache["pre_acts"][layer] > 0.0)
        h_in = cache["layer_in"][layer]
        g_w_self[layer] = h_in.T @ d_z
        g_b_msg[layer] = d_z.sum(axis=0)
        # Aggregation term: agg = scatter_dst(edge_w * (h_in W_nbr)[src]).
        d_msg = d_z[batch.dst] * batch.edge_w[:, None]
        d_proj = _scatter_sum(d_msg, batch.src, n_nodes)
        g_w_nbr[layer] = h_in.T @ d_proj
        d_h = d_z @ params.w_self[layer].T + d_proj @ params.w_nbr[layer].T
    g_w_in = batch.features.T @ d_h
    g_b_in = d_h.sum(axis=0)

    grads = [g_w_in, g_b_in, *g_w_self, *g_w_nbr, *g_b_msg, g_w_read, g_b_read, g_w_out, g_b_out]
    return loss, grads


def gcn_loss(batch_or_graphs, labels: np.ndarray, params: GraphNetParams) -> float:
    batch = batch_or_graphs if isinstance(batch_or_graphs, _Batch) else _pack(batch_or_graphs)
    logits, _, _ = _forward_batch(batch, params)
    probs = _softmax(logits)
    picked = np.clip(probs[np.arange(batch.n_graphs), labels], 1e-300, None)
    return float(-np.mean(np.log(picked)))


def gcn_train(
    graphs: list[DisparityGraph],
    labels: np.ndarray | list[int],
    hidden: int = DEFAULT_HIDDEN,
    lr: float = DEFAULT_LR,
    epochs: int = DEFAULT_EPOCHS,
    seed: int = DEFAULT_SEED,
) -> GraphNetParams:
    """Full-batch gradient descent with momentum 0.9; deterministic per seed."""
    labels = np.asarray(labels, dtype=np.int64)
    if len(graphs) != labels.size or len(graphs) < 2:
        raise ValueError("need at least two labelled graphs")
    if np.unique(labels).size < 2:
        raise SingleClassError("training labels contain a single class")
    params = init_params(graphs[0].root.size, hidden=hidden, lr=lr, epochs=epochs, seed=seed)
    batch = _pack(graphs)
    velocity = [np.zeros_like(p) for p in params.flat()]
    best_loss = np.inf
    best: list[np.ndarray] = []
    for _ in range(epochs):
        loss, grads = _loss_and_grads(batch, labels, params)
        if loss < best_loss:
            best_loss = loss
            best = [p.copy() for p in params.flat()]
        for v, p, g in zip(velocity, params.flat(), grads):
            v *= MOMENTUM
            v -= lr * g
            p += v
    # Momentum can overshoot on the last steps; never return parameters worse
    # than the best batch loss seen (which includes the starting point).
    if gcn_loss(batch, labels, params) > best_loss:
        for p, b in zip(params.flat(), best):
            p[...] = b
    return params


def gcn_grad_check(
    params: GraphNetParams,
    graph: DisparityGraph,
    label: int,
    eps: float = 1e-5,
    max_coords: int = 200,
    rng: np.random.Generator | None = None,
) -> float:
    """Max relative error between analytic and central-difference gradients
    over a coordinate subsample. Near-zero pairs (<1e-10 both) are skipped,
    and the denominator is floored at 1e-6 so difference round-off on tiny
    gradients cannot register as disagreement."""
    if not 0.0 < eps <= 1e-3:
        raise ValueError("eps must lie in (0, 1e-3]")
    rng = rng or np.random.default_rng(0)
    batch = _pack([graph])
    labels = np.asarray([label], dtype=np.int64)
    _, grads = _loss_and_grads(batch, labels, params)
    slots = params.flat()
    coords = [(i, j) for i, p in enumerate(slots) for j in range(p.size)]
    if len(coords) > max_coords:
        picked = rng.choice(len(coords), size=max_coords, replace=False)
        coords = [coords[int(c)] for c in picked]
    worst = 0.0
    for pi, flat_ix in coords:
        p = slots[pi]
        orig = p.flat[flat_ix]
        p.flat[flat_ix] = orig + eps
        up = gcn_loss(batch, labels, params)
        p.flat[flat_ix] = orig - eps
        down = gcn_loss(batch, labels, params)
        p.flat[flat_ix] = orig
        numeric = (up - down) / (2.0 * eps)
        analytic = grads[pi].flat[flat_ix]
        if abs(numeric) < 1e-10 and abs(analytic) < 1e-10:
            continue
        denom = max(abs(numeric), abs(analytic), 1e-6)
        worst = max(worst, abs(numeric - analytic) / denom)
    return worst


def params_to_arrays(params: GraphNetParams) -> dict[str, np.ndarray]:
    return {
        "w_in": params.w_in,
        "b_in": params.b_in,
        "w_self_0": params.w_self[0],
        "w_self_1": params.w_self[1],
        "w_nbr_0": params.w_nbr[0],
        "w_nbr_1": params.w_nbr[1],
        "b_msg_0": params.b_msg[0],
        "b_msg_1": params.b_msg[1],
        "w_read": params.w_read,
        "b_read": params.b_read,
        "w_out": params.w_out,
        "b_out": params.b_out,
    }


def params_from_arrays(
    arrays: dict[str, np.ndarray],
    hidden: int = DEFAULT_HIDDEN,
    lr: float = DEFAULT_LR,
    epochs: int = DEFAULT_EPOCHS,
    seed: int = DEFAULT_SEED,
) -> GraphNetParams:
    return GraphNetParams(
        w_in=arrays["w_in"],
        b_in=arrays["b_in"],
        w_self=[arrays["w_self_0"], arrays["w_self_1"]],
        w_nbr=[arrays["w_nbr_0"], arrays["w_nbr_1"]],
        b_msg=[arrays["b_msg_0"], arrays["b_msg_1"]],
        w_read=arrays["w_read"],
        b_read=arrays["b_read"],
        w_out=arrays["w_out"],
        b_out=arrays["b_out"],
        hidden=int(arrays["w_in"].shape[1]),
        lr=lr,
        epochs=epochs,
        seed=seed,
    )
