"""Siamese graph similarity model: configuration, forward/backward passes,
and training."""

from .config import CORRELATION_GRID, GRID_PRESETS, SYNTHETIC_GRID, SgnnConfig, grid_configs
from .model import (
    BatchArrays,
    ForwardCache,
    PairBatcher,
    SgnnParams,
    assemble_batch,
    gcn_forward,
    init_params,
    input_features,
    loss_and_grad,
    make_score_fn,
    predict_label,
    score_batch_eval,
    score_pair,
    similarity_forward,
    similarity_head,
)
from .train import (
    AdamState,
    adam_step,
    evaluate_pairs,
    grid_search,
    load_checkpoint,
    save_checkpoint,
    train,
)

__all__ = [
    "AdamState",
    "BatchArrays",
    "CORRELATION_GRID",
    "ForwardCache",
    "GRID_PRESETS",
    "PairBatcher",
    "SYNTHETIC_GRID",
    "SgnnConfig",
    "SgnnParams",
    "adam_step",
    "assemble_batch",
    "evaluate_pairs",
    "gcn_forward",
    "grid_configs",
    "grid_search",
    "init_params",
    "input_features",
    "load_checkpoint",
    "loss_and_grad",
    "make_score_fn",
    "predict_label",
    "save_checkpoint",
    "score_batch_eval",
    "score_pair",
    "similarity_forward",
    "similarity_head",
    "train",
]
