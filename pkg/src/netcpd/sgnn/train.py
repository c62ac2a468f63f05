"""Adam optimization, the epoch loop with F1-based snapshot selection, grid
search, and the JSON checkpoint format.

Training is single-threaded and bit-reproducible for a given seed: the same
initialization, shuffles and dropout masks come out of one Generator.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from ..errors import ParameterError
from ..evaluation import pair_metrics
from ..graph import Graph
from ..sampling import PairDataset
from .config import SgnnConfig, grid_configs
from .model import (
    PairBatcher,
    SgnnParams,
    init_params,
    input_features,
    loss_and_grad,
    pooled_features,
    recalibrate_batch_norm,
    score_batch_eval,
)

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8

CHECKPOINT_FORMAT = "netcpd-sgnn-checkpoint"
CHECKPOINT_VERSION = 1


@dataclass
class AdamState:
    t: int
    m: dict[str, np.ndarray]
    v: dict[str, np.ndarray]

    @classmethod
    def fresh(cls, params: SgnnParams) -> "AdamState":
        return cls(
            0,
            {k: np.zeros_like(a) for k, a in params.trainable().items()},
            {k: np.zeros_like(a) for k, a in params.trainable().items()},
        )

    def copy(self) -> "AdamState":
        return AdamState(
            self.t,
            {k: a.copy() for k, a in self.m.items()},
            {k: a.copy() for k, a in self.v.items()},
        )


def adam_step(
    params: SgnnParams,
    grads: Mapping[str, np.ndarray],
    state: AdamState,
    lr: float,
    weight_decay: float = 0.0,
) -> tuple[SgnnParams, AdamState]:
    """One bias-corrected Adam update with decoupled weight decay applied
    multiplicatively before the moment update. Functional: inputs are left
    untouched."""
    new_params = params.copy()
    new_state = state.copy()
    new_state.t += 1
    t = new_state.t
    updated: dict[str, np.ndarray] = {}
    for name, value in new_params.trainable().items():
        g = grads[name]
        if g.shape != value.shape:
            raise ParameterError(f"gradient shape mismatch for {name}")
        p = value * (1.0 - lr * weight_decay)
        m = new_state.m[name] = ADAM_BETA1 * new_state.m[name] + (1 - ADAM_BETA1) * g
        v = new_state.v[name] = ADAM_BETA2 * new_state.v[name] + (1 - ADAM_BETA2) * g**2
        m_hat = m / (1 - ADAM_BETA1**t)
        v_hat = v / (1 - ADAM_BETA2**t)
        updated[name] = p - lr * m_hat / (np.sqrt(v_hat) + ADAM_EPS)
    new_params.set_trainable(updated)
    return new_params, new_state


def evaluate_pairs(
    params: SgnnParams,
    config: SgnnConfig,
    batcher: PairBatcher,
    dataset: PairDataset,
    chunk: int = 256,
) -> tuple[float, float]:
    """(accuracy, F1) on a pair dataset at the 0.5 score threshold, in eval
    mode."""
    preds, labels = [], []
    pairs = dataset.pairs
    for start in range(0, len(pairs), chunk):
        part = pairs[start : start + chunk]
        scores = score_batch_eval(params, config, batcher.assemble(part))
        preds.extend(int(s > 0.5) for s in scores)
        labels.extend(p.label for p in part)
    return pair_metrics(preds, labels)


def train(
    graphs: Sequence[Graph],
    train_pairs: PairDataset,
    val_pairs: PairDataset,
    config: SgnnConfig,
    seed: int = 0,
) -> tuple[SgnnParams, list[dict]]:
    """Mini-batch Adam over the training pairs; after every epoch the model
    is scored on the validation pairs and the snapshot with the highest
    validation F1 is kept (ties go to the earliest epoch). With 0 epochs the
    initial parameters come back and the history is empty."""
    if len(train_pairs) == 0 or len(val_pairs) == 0:
        raise ParameterError("training and validation pair sets must be nonempty")
    rng = np.random.default_rng(seed)
    graphs = list(graphs)
    input_dim = input_features(graphs[0], config.encoding).shape[1]
    params = init_params(config, input_dim, rng)
    state = AdamState.fresh(params)
    batcher = PairBatcher(graphs, config.encoding)

    best = params.copy()
    best_f1 = -np.inf
    history: list[dict] = []
    n_train = len(train_pairs)
    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(n_train)
        losses = []
        for start in range(0, n_train, config.batch_size):
            chunk = [train_pairs.pairs[i] for i in order[start : start + config.batch_size]]
            batch = batcher.assemble(chunk)
            loss, grads = loss_and_grad(params, config, batch, rng)
            params, state = adam_step(params, grads, state, config.learning_rate, config.weight_decay)
            losses.append(loss)
        _recalibrate(params, config, batcher, train_pairs)
        val_acc, val_f1 = evaluate_pairs(params, config, batcher, val_pairs)
        history.append(
            {"epoch": epoch, "train_loss": float(np.mean(losses)),
             "val_f1": val_f1, "val_accuracy": val_acc}
        )
        if val_f1 > best_f1:
            best, best_f1 = params.copy(), val_f1
    return best, history


def _recalibrate(
    params: SgnnParams,
    config: SgnnConfig,
    batcher: PairBatcher,
    dataset: PairDataset,
    chunk: int = 256,
) -> None:
    """Reset the running batch-norm statistics from the training pairs with
    the current parameters, so eval-mode scores sit where the loss put them."""
    pooled = np.concatenate(
        [
            pooled_features(params, config, batcher.assemble(dataset.pairs[s : s + chunk]))
            for s in range(0, len(dataset.pairs), chunk)
        ]
    )
    recalibrate_batch_norm(params, config, pooled)


def grid_search(
    grids: Mapping[str, Sequence],
    graphs: Sequence[Graph],
    train_pairs: PairDataset,
    val_pairs: PairDataset,
    base: SgnnConfig | None = None,
    seed: int = 0,
) -> tuple[SgnnConfig, list[dict]]:
    """Train every configuration in the grid product and return the one with
    the highest validation F1 (ties go to the lexicographically first
    config). Also returns one summary record per configuration."""
    base = base if base is not None else SgnnConfig()
    results = []
    best_config, best_f1 = None, -np.inf
    for config in grid_configs(grids, base):
        _, history = train(graphs, train_pairs, val_pairs, config, seed=seed)
        if history:
            f1 = max(h["val_f1"] for h in history)
        else:
            rng = np.random.default_rng(seed)
            input_dim = input_features(graphs[0], config.encoding).shape[1]
            params = init_params(config, input_dim, rng)
            batcher = PairBatcher(list(graphs), config.encoding)
            _, f1 = evaluate_pairs(params, config, batcher, val_pairs)
        results.append({"config": config.to_dict(), "val_f1": float(f1)})
        if f1 > best_f1:
            best_config, best_f1 = config, f1
    return best_config, results


def save_checkpoint(
    path,
    params: SgnnParams,
    config: SgnnConfig,
    seed: int,
    adam_state: AdamState | None = None,
    meta: dict | None = None,
) -> None:
    """Versioned JSON container; array floats round-trip exactly."""
    payload = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "seed": seed,
        "config": config.to_dict(),
        "params": {
            "gcn_weights": [w.tolist() for w in params.gcn_weights],
            "gcn_biases": [b.tolist() for b in params.gcn_biases],
            "fc_weights": [w.tolist() for w in params.fc_weights],
            "fc_biases": [b.tolist() for b in params.fc_biases],
            "bn_gamma": [g.tolist() for g in params.bn_gamma],
            "bn_beta": [b.tolist() for b in params.bn_beta],
            "bn_running_mean": [m.tolist() for m in params.bn_running_mean],
            "bn_running_var": [v.tolist() for v in params.bn_running_var],
        },
        "adam_state": None
        if adam_state is None
        else {
            "t": adam_state.t,
            "m": {k: a.tolist() for k, a in adam_state.m.items()},
            "v": {k: a.tolist() for k, a in adam_state.v.items()},
        },
        "meta": meta or {},
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh)


def load_checkpoint(path) -> tuple[SgnnParams, SgnnConfig, int, AdamState | None]:
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("format") != CHECKPOINT_FORMAT:
        raise ParameterError(f"{path} is not a model checkpoint")
    if payload.get("version") != CHECKPOINT_VERSION:
        raise ParameterError(f"unsupported checkpoint version {payload.get('version')}")
    p = payload["params"]

    def arrays(key):
        return [np.asarray(a, dtype=float) for a in p[key]]

    params = SgnnParams(
        arrays("gcn_weights"), arrays("gcn_biases"),
        arrays("fc_weights"), arrays("fc_biases"),
        arrays("bn_gamma"), arrays("bn_beta"),
        arrays("bn_running_mean"), arrays("bn_running_var"),
    )
    config = SgnnConfig.from_dict(payload["config"])
    state = None
    if payload.get("adam_state"):
        raw = payload["adam_state"]
        state = AdamState(
            int(raw["t"]),
            {k: np.asarray(a, dtype=float) for k, a in raw["m"].items()},
            {k: np.asarray(a, dtype=float) for k, a in raw["v"].items()},
        )
    return params, config, int(payload["seed"]), state
