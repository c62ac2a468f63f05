"""Siamese graph similarity model: shared GCN encoder, node-wise Euclidean
distance, sort-k/max/average pooling and a two-layer batch-normalized head,
with exact handwritten gradients.

The two branches share every encoder parameter, so encoder gradients sum the
contributions of both inputs. Pooling routes gradient only to the selected
entries; the node distance uses an epsilon-smoothed norm in training mode so
its gradient exists at zero. Scores are clipped inside the cross-entropy
only, never on the way out.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from ..errors import ConfigurationError, ParameterError
from ..graph import EncodingKind, Graph, normalized_augmented_adjacency, positional_encoding
from .config import SgnnConfig

BN_EPS = 1e-5
BN_MOMENTUM = 0.1
DIST_EPS = 1e-12
SCORE_CLIP = 1e-7


@dataclass
class SgnnParams:
    """All tensors of the model. Batch-norm running statistics are state,
    not trainable."""

    gcn_weights: list[np.ndarray]
    gcn_biases: list[np.ndarray]
    fc_weights: list[np.ndarray]
    fc_biases: list[np.ndarray]
    bn_gamma: list[np.ndarray]
    bn_beta: list[np.ndarray]
    bn_running_mean: list[np.ndarray]
    bn_running_var: list[np.ndarray]

    def trainable(self) -> dict[str, np.ndarray]:
        out: dict[str, np.ndarray] = {}
        for j, (w, b) in enumerate(zip(self.gcn_weights, self.gcn_biases)):
            out[f"gcn_w{j}"] = w
            out[f"gcn_b{j}"] = b
        for i in range(len(self.fc_weights)):
            out[f"fc_w{i}"] = self.fc_weights[i]
            out[f"fc_b{i}"] = self.fc_biases[i]
            out[f"bn_gamma{i}"] = self.bn_gamma[i]
            out[f"bn_beta{i}"] = self.bn_beta[i]
        return out

    def set_trainable(self, values: Mapping[str, np.ndarray]) -> None:
        for j in range(len(self.gcn_weights)):
            self.gcn_weights[j] = values[f"gcn_w{j}"]
            self.gcn_biases[j] = values[f"gcn_b{j}"]
        for i in range(len(self.fc_weights)):
            self.fc_weights[i] = values[f"fc_w{i}"]
            self.fc_biases[i] = values[f"fc_b{i}"]
            self.bn_gamma[i] = values[f"bn_gamma{i}"]
            self.bn_beta[i] = values[f"bn_beta{i}"]

    def copy(self) -> "SgnnParams":
        return SgnnParams(
            [w.copy() for w in self.gcn_weights],
            [b.copy() for b in self.gcn_biases],
            [w.copy() for w in self.fc_weights],
            [b.copy() for b in self.fc_biases],
            [g.copy() for g in self.bn_gamma],
            [b.copy() for b in self.bn_beta],
            [m.copy() for m in self.bn_running_mean],
            [v.copy() for v in self.bn_running_var],
        )


def _glorot(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


def init_params(config: SgnnConfig, input_dim: int, rng: np.random.Generator) -> SgnnParams:
    """Seeded uniform-Glorot weights, zero biases, identity batch norm."""
    dims = [input_dim] + [config.hidden_units] * config.gcn_layers
    gcn_w = [_glorot(rng, dims[j], dims[j + 1]) for j in range(config.gcn_layers)]
    gcn_b = [np.zeros(dims[j + 1]) for j in range(config.gcn_layers)]
    h1, h2 = config.fc_dims
    fc_dims = [(config.pool_dim, h1), (h1, h2)]
    fc_w = [_glorot(rng, a, b) for a, b in fc_dims]
    fc_b = [np.zeros(b) for _, b in fc_dims]
    return SgnnParams(
        gcn_w, gcn_b, fc_w, fc_b,
        [np.ones(h1), np.ones(h2)],
        [np.zeros(h1), np.zeros(h2)],
        [np.zeros(h1), np.zeros(h2)],
        [np.ones(h1), np.ones(h2)],
    )


def input_features(g: Graph, encoding: EncodingKind) -> np.ndarray:
    """Node attributes when present, otherwise the positional encoding."""
    return g.attributes if g.attributes is not None else positional_encoding(g, encoding)


@dataclass
class BatchArrays:
    """Stacked per-pair inputs: adjacency-normalized operators are built on
    demand from the adjacency stacks."""

    a1: np.ndarray  # (B, n, n) normalized augmented adjacency, branch 1
    a2: np.ndarray
    h01: np.ndarray  # (B, n, d0)
    h02: np.ndarray
    y: np.ndarray  # (B,)


def assemble_batch(
    graph_pairs: Sequence[tuple[Graph, Graph, int]], encoding: EncodingKind
) -> BatchArrays:
    if not graph_pairs:
        raise ParameterError("empty batch")
    a1 = np.stack([normalized_augmented_adjacency(g1) for g1, _, _ in graph_pairs])
    a2 = np.stack([normalized_augmented_adjacency(g2) for _, g2, _ in graph_pairs])
    h01 = np.stack([input_features(g1, encoding) for g1, _, _ in graph_pairs])
    h02 = np.stack([input_features(g2, encoding) for _, g2, _ in graph_pairs])
    y = np.asarray([y for _, _, y in graph_pairs], dtype=float)
    return BatchArrays(a1, a2, h01, h02, y)


class PairBatcher:
    """Caches per-graph input features (and normalized operators) so epochs
    over the same graph pool do not recompute encodings."""

    def __init__(self, graphs: Sequence[Graph], encoding: EncodingKind):
        self.graphs = list(graphs)
        self.encoding = encoding
        self._feat: dict[int, np.ndarray] = {}
        self._op: dict[int, np.ndarray] = {}

    def _features(self, idx: int) -> np.ndarray:
        if idx not in self._feat:
            self._feat[idx] = input_features(self.graphs[idx], self.encoding)
        return self._feat[idx]

    def _operator(self, idx: int) -> np.ndarray:
        if idx not in self._op:
            self._op[idx] = normalized_augmented_adjacency(self.graphs[idx])
        return self._op[idx]

    def assemble(self, pairs) -> BatchArrays:
        """pairs: PairExamples whose 1-based timestamps index self.graphs."""
        i1 = [p.t1 - 1 for p in pairs]
        i2 = [p.t2 - 1 for p in pairs]
        return BatchArrays(
            np.stack([self._operator(i) for i in i1]),
            np.stack([self._operator(i) for i in i2]),
            np.stack([self._features(i) for i in i1]),
            np.stack([self._features(i) for i in i2]),
            np.asarray([p.label for p in pairs], dtype=float),
        )


@dataclass
class _BranchCache:
    a: np.ndarray
    pre_products: list[np.ndarray]  # S_j = A~ @ H^{j-1}
    preacts: list[np.ndarray]  # Z_j
    masks: list[np.ndarray | None]
    out: np.ndarray  # H^J


@dataclass
class ForwardCache:
    """Intermediates needed for exact gradients; built in training mode."""

    branch1: _BranchCache
    branch2: _BranchCache
    diff: np.ndarray  # (B, n, h)
    f: np.ndarray  # (B, n)
    pool_idx: np.ndarray | None  # (B, k_eff) sort-k / (B,) max
    pooled: np.ndarray  # (B, pool_dim)
    fc_inputs: list[np.ndarray]
    bn_xhat: list[np.ndarray]
    bn_istd: list[np.ndarray]
    fc_preacts: list[np.ndarray]  # Y_l (post-BN, pre-ReLU)
    fc_masks: list[np.ndarray | None]
    fc_outs: list[np.ndarray]
    scores: np.ndarray  # (B,)


def _dropout_mask(shape, dropout: float, train: bool, rng: np.random.Generator | None):
    if not train or dropout == 0.0:
        return None
    if rng is None:
        raise ParameterError("training mode with dropout needs an rng")
    return (rng.random(shape) >= dropout).astype(float)


def _gcn_branch(
    params: SgnnParams,
    a: np.ndarray,
    h0: np.ndarray,
    config: SgnnConfig,
    train: bool,
    rng: np.random.Generator | None,
) -> _BranchCache:
    if h0.shape[-1] != params.gcn_weights[0].shape[0]:
        raise ConfigurationError(
            f"input features have width {h0.shape[-1]}, "
            f"model expects {params.gcn_weights[0].shape[0]}"
        )
    keep = 1.0 - config.dropout
    h = h0
    pre_products, preacts, masks = [], [], []
    for w, b in zip(params.gcn_weights, params.gcn_biases):
        s = a @ h
        z = s @ w + b
        h = np.maximum(z, 0.0)
        mask = _dropout_mask(h.shape, config.dropout, train, rng)
        if mask is not None:
            h = h * mask / keep
        pre_products.append(s)
        preacts.append(z)
        masks.append(mask)
    return _BranchCache(a, pre_products, preacts, masks, h)


def _pool(f: np.ndarray, config: SgnnConfig) -> tuple[np.ndarray, np.ndarray | None]:
    """Pooled vector (B, pool_dim) and the selected indices for backprop.

    Sort-k takes the k largest distances in descending order (stable sort,
    ties to the lowest node index), zero-padded when k exceeds n.
    """
    B, n = f.shape
    if config.pooling_variant == "sortk":
        k_eff = min(config.sortk, n)
        order = np.argsort(-f, axis=1, kind="stable")[:, :k_eff]
        pooled = np.take_along_axis(f, order, axis=1)
        if k_eff < config.sortk:
            pooled = np.pad(pooled, ((0, 0), (0, config.sortk - k_eff)))
        return pooled, order
    if config.pooling_variant == "max":
        idx = np.argmax(f, axis=1)
        return f[np.arange(B), idx][:, None], idx
    return f.mean(axis=1)[:, None], None


def _unpool(dp: np.ndarray, f_shape, config: SgnnConfig, idx) -> np.ndarray:
    B, n = f_shape
    df = np.zeros(f_shape)
    if config.pooling_variant == "sortk":
        k_eff = idx.shape[1]
        np.put_along_axis(df, idx, dp[:, :k_eff], axis=1)
    elif config.pooling_variant == "max":
        df[np.arange(B), idx] = dp[:, 0]
    else:
        df += dp / n
    return df


def forward_batch(
    params: SgnnParams,
    config: SgnnConfig,
    batch: BatchArrays,
    train: bool,
    rng: np.random.Generator | None = None,
    update_running_stats: bool = True,
) -> tuple[np.ndarray, ForwardCache | None]:
    """Scores for a batch of pairs; returns the gradient cache when training."""
    keep = 1.0 - config.dropout
    br1 = _gcn_branch(params, batch.a1, batch.h01, config, train, rng)
    br2 = _gcn_branch(params, batch.a2, batch.h02, config, train, rng)
    diff = br1.out - br2.out
    sq = np.sum(diff**2, axis=2)
    f = np.sqrt(sq + DIST_EPS**2) if train else np.sqrt(sq)
    pooled, pool_idx = _pool(f, config)

    x = pooled
    fc_inputs, bn_xhat, bn_istd, fc_preacts, fc_masks, fc_outs = [], [], [], [], [], []
    for i in range(2):
        u = x @ params.fc_weights[i] + params.fc_biases[i]
        if train:
            mu = u.mean(axis=0)
            var = u.var(axis=0)
            if update_running_stats:
                params.bn_running_mean[i] *= 1.0 - BN_MOMENTUM
                params.bn_running_mean[i] += BN_MOMENTUM * mu
                params.bn_running_var[i] *= 1.0 - BN_MOMENTUM
                params.bn_running_var[i] += BN_MOMENTUM * var
        else:
            mu = params.bn_running_mean[i]
            var = params.bn_running_var[i]
        istd = 1.0 / np.sqrt(var + BN_EPS)
        xhat = (u - mu) * istd
        y_pre = params.bn_gamma[i] * xhat + params.bn_beta[i]
        # the last layer stays linear after its batch norm: a trailing ReLU
        # would pin the summed logit at >= 0 and scores at >= 0.5
        if i < 1:
            out = np.maximum(y_pre, 0.0)
            mask = _dropout_mask(out.shape, config.dropout, train, rng)
            if mask is not None:
                out = out * mask / keep
        else:
            out = y_pre
            mask = None
        fc_inputs.append(x)
        bn_xhat.append(xhat)
        bn_istd.append(np.broadcast_to(istd, xhat.shape[1:]).copy())
        fc_preacts.append(y_pre)
        fc_masks.append(mask)
        fc_outs.append(out)
        x = out

    scores = 1.0 / (1.0 + np.exp(-x.sum(axis=1)))
    if not train:
        return scores, None
    cache = ForwardCache(
        br1, br2, diff, f, pool_idx, pooled,
        fc_inputs, bn_xhat, bn_istd, fc_preacts, fc_masks, fc_outs, scores,
    )
    return scores, cache


def _gcn_backward(
    params: SgnnParams,
    branch: _BranchCache,
    d_out: np.ndarray,
    config: SgnnConfig,
    grads: dict[str, np.ndarray],
) -> None:
    keep = 1.0 - config.dropout
    dh = d_out
    for j in reversed(range(config.gcn_layers)):
        if branch.masks[j] is not None:
            dh = dh * branch.masks[j] / keep
        dz = dh * (branch.preacts[j] > 0)
        grads[f"gcn_w{j}"] += np.einsum("bni,bnj->ij", branch.pre_products[j], dz)
        grads[f"gcn_b{j}"] += dz.sum(axis=(0, 1))
        if j > 0:
            dh = branch.a @ (dz @ params.gcn_weights[j].T)


def loss_and_grad(
    params: SgnnParams,
    config: SgnnConfig,
    batch: BatchArrays | Sequence[tuple[Graph, Graph, int]],
    rng: np.random.Generator | None = None,
    update_running_stats: bool = True,
) -> tuple[float, dict[str, np.ndarray]]:
    """Mean cross-entropy over the batch and its exact parameter gradients.

    Training-mode forward: batch statistics drive the batch norm (running
    statistics are updated as a side effect unless disabled), dropout is
    active when configured, and the node distance is epsilon-smoothed.
    """
    if not isinstance(batch, BatchArrays):
        batch = assemble_batch(batch, config.encoding)
    B = batch.y.shape[0]
    scores, cache = forward_batch(
        params, config, batch, train=True, rng=rng, update_running_stats=update_running_stats
    )
    y = batch.y
    s_clipped = np.clip(scores, SCORE_CLIP, 1.0 - SCORE_CLIP)
    loss = float(np.mean(-y * np.log(s_clipped) - (1.0 - y) * np.log(1.0 - s_clipped)))

    grads = {name: np.zeros_like(arr) for name, arr in params.trainable().items()}
    ds_clipped = (-y / s_clipped + (1.0 - y) / (1.0 - s_clipped)) / B
    inside = (scores > SCORE_CLIP) & (scores < 1.0 - SCORE_CLIP)
    ds = ds_clipped * inside
    dz_sum = ds * scores * (1.0 - scores)

    keep = 1.0 - config.dropout
    dx = np.repeat(dz_sum[:, None], config.fc_dims[1], axis=1)
    for i in (1, 0):
        if cache.fc_masks[i] is not None:
            dx = dx * cache.fc_masks[i] / keep
        dy = dx if i == 1 else dx * (cache.fc_preacts[i] > 0)
        grads[f"bn_gamma{i}"] += (dy * cache.bn_xhat[i]).sum(axis=0)
        grads[f"bn_beta{i}"] += dy.sum(axis=0)
        dxhat = dy * params.bn_gamma[i]
        xhat = cache.bn_xhat[i]
        istd = cache.bn_istd[i]
        du = (istd / B) * (
            B * dxhat - dxhat.sum(axis=0) - xhat * (dxhat * xhat).sum(axis=0)
        )
        grads[f"fc_w{i}"] += cache.fc_inputs[i].T @ du
        grads[f"fc_b{i}"] += du.sum(axis=0)
        dx = du @ params.fc_weights[i].T

    df = _unpool(dx, cache.f.shape, config, cache.pool_idx)
    ddiff = (df / cache.f)[:, :, None] * cache.diff
    _gcn_backward(params, cache.branch1, ddiff, config, grads)
    _gcn_backward(params, cache.branch2, -ddiff, config, grads)
    return loss, grads


def gcn_forward(
    params: SgnnParams,
    config: SgnnConfig,
    g: Graph,
    train: bool = False,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Node embeddings of one graph through the shared encoder."""
    a = normalized_augmented_adjacency(g)[None]
    h0 = input_features(g, config.encoding)[None]
    return _gcn_branch(params, a, h0, config, train, rng).out[0]


def similarity_head(
    params: SgnnParams, config: SgnnConfig, h1: np.ndarray, h2: np.ndarray
) -> float:
    """Eval-mode score from two node-embedding matrices (running batch-norm
    statistics, exact distances, no dropout)."""
    if h1.shape != h2.shape:
        raise ConfigurationError("embedding shapes differ")
    f = np.sqrt(np.sum((h1 - h2) ** 2, axis=1))[None, :]
    x, _ = _pool(f, config)
    for i in range(2):
        u = x @ params.fc_weights[i] + params.fc_biases[i]
        xhat = (u - params.bn_running_mean[i]) / np.sqrt(params.bn_running_var[i] + BN_EPS)
        y_pre = params.bn_gamma[i] * xhat + params.bn_beta[i]
        x = np.maximum(y_pre, 0.0) if i < 1 else y_pre
    return float(1.0 / (1.0 + np.exp(-x.sum())))


def similarity_forward(
    params: SgnnParams,
    config: SgnnConfig,
    h1: np.ndarray,
    h2: np.ndarray,
    train: bool = False,
) -> float:
    """Similarity score in (0, 1) for one pre-embedded pair. Training-mode
    scoring of single pairs runs through the batched path (batch of one)."""
    if not train:
        return similarity_head(params, config, h1, h2)
    diff = h1 - h2
    f = np.sqrt(np.sum(diff**2, axis=1) + DIST_EPS**2)[None, :]
    x, _ = _pool(f, config)
    for i in range(2):
        u = x @ params.fc_weights[i] + params.fc_biases[i]
        mu, var = u.mean(axis=0), u.var(axis=0)
        xhat = (u - mu) / np.sqrt(var + BN_EPS)
        y_pre = params.bn_gamma[i] * xhat + params.bn_beta[i]
        x = np.maximum(y_pre, 0.0) if i < 1 else y_pre
    return float(1.0 / (1.0 + np.exp(-x.sum())))


def score_pair(params: SgnnParams, config: SgnnConfig, g1: Graph, g2: Graph) -> float:
    return similarity_head(
        params, config, gcn_forward(params, config, g1), gcn_forward(params, config, g2)
    )


def make_score_fn(params: SgnnParams, config: SgnnConfig):
    """Eval-mode pair scorer with a per-object embedding cache, for scoring
    the many overlapping pairs of a detection stream."""
    cache: dict[int, np.ndarray] = {}

    def embed(g: Graph) -> np.ndarray:
        key = id(g)
        if key not in cache:
            cache[key] = gcn_forward(params, config, g)
        return cache[key]

    def score(g1: Graph, g2: Graph) -> float:
        return similarity_head(params, config, embed(g1), embed(g2))

    return score


def predict_label(score: float) -> int:
    """1 iff the score strictly exceeds 0.5."""
    if not 0.0 <= score <= 1.0:
        raise ParameterError(f"score {score} outside [0, 1]")
    return 1 if score > 0.5 else 0


def score_batch_eval(params: SgnnParams, config: SgnnConfig, batch: BatchArrays) -> np.ndarray:
    scores, _ = forward_batch(params, config, batch, train=False)
    return scores


def pooled_features(params: SgnnParams, config: SgnnConfig, batch: BatchArrays) -> np.ndarray:
    """Eval-mode pooled distance vectors (B, pool_dim), the input of the
    first FC layer."""
    h1 = _gcn_branch(params, batch.a1, batch.h01, config, False, None).out
    h2 = _gcn_branch(params, batch.a2, batch.h02, config, False, None).out
    f = np.sqrt(np.sum((h1 - h2) ** 2, axis=2))
    pooled, _ = _pool(f, config)
    return pooled


def recalibrate_batch_norm(
    params: SgnnParams, config: SgnnConfig, pooled: np.ndarray
) -> None:
    """Replace the batch-norm running statistics with the exact pooled-input
    statistics of the current parameters.

    Running averages lag the moving parameters during training, which shifts
    eval-mode scores away from the 0.5 operating point the loss optimized.
    Layer 2's input depends on layer 1's deployed statistics, so the two
    layers resolve sequentially.
    """
    x = pooled
    for i in range(2):
        u = x @ params.fc_weights[i] + params.fc_biases[i]
        params.bn_running_mean[i] = u.mean(axis=0)
        params.bn_running_var[i] = u.var(axis=0)
        xhat = (u - params.bn_running_mean[i]) / np.sqrt(params.bn_running_var[i] + BN_EPS)
        y_pre = params.bn_gamma[i] * xhat + params.bn_beta[i]
        x = np.maximum(y_pre, 0.0) if i < 1 else y_pre
