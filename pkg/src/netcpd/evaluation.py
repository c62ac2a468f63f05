"""Detection and pair-classification metrics: single change-point
localisation error, tolerance-adjusted F1 over multiple change-points, and
plain accuracy/F1 for labelled pairs."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ParameterError

DEFAULT_TOLERANCE = 5
TOLERANCE_SWEEP = (1, 3, 5, 7)


@dataclass(frozen=True)
class DetectionScore:
    precision: float
    recall: float
    f1: float
    matches: tuple[tuple[int, int], ...] = field(default_factory=tuple)


def localisation_error(tau_hat: int, tau: int) -> int:
    """|estimated - true| in timestamps."""
    return abs(int(tau_hat) - int(tau))


def adjusted_f1(
    predicted: Sequence[int], truth: Sequence[int], T: int, tol: int = DEFAULT_TOLERANCE
) -> DetectionScore:
    """Change-point F1 with a +-tol matching window.

    Predictions and truths are matched one-to-one, greedily by increasing
    distance (ties on the earlier truth, then the earlier prediction), so a
    cluster of predictions near one true change-point earns credit once.
    Empty sets follow the zero convention.
    """
    if tol < 0:
        raise ParameterError("tolerance must be >= 0")
    pred = sorted(int(t) for t in predicted)
    true = sorted(int(t) for t in truth)
    for t in pred + true:
        if not 1 <= t <= T:
            raise ParameterError(f"timestamp {t} outside [1, {T}]")
    candidates = sorted(
        (abs(p - tau), tau, p) for tau in true for p in pred if abs(p - tau) <= tol
    )
    matched_pred: set[int] = set()
    matched_true: set[int] = set()
    matches: list[tuple[int, int]] = []
    for _, tau, p in candidates:
        if tau in matched_true or p in matched_pred:
            continue
        matched_true.add(tau)
        matched_pred.add(p)
        matches.append((p, tau))
    m = len(matches)
    precision = m / len(pred) if pred else 0.0
    recall = m / len(true) if true else 0.0
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    return DetectionScore(precision, recall, f1, tuple(sorted(matches)))


def pair_metrics(predicted: Sequence[int], truth: Sequence[int]) -> tuple[float, float]:
    """(accuracy, binary F1 with label 1 positive) over pair labels."""
    pred = np.asarray(predicted, dtype=int)
    true = np.asarray(truth, dtype=int)
    if pred.shape != true.shape or pred.size == 0:
        raise ParameterError("predictions and labels must be nonempty and equal length")
    accuracy = float(np.mean(pred == true))
    tp = int(np.sum((pred == 1) & (true == 1)))
    fp = int(np.sum((pred == 1) & (true == 0)))
    fn = int(np.sum((pred == 0) & (true == 1)))
    denom = 2 * tp + fp + fn
    f1 = 0.0 if denom == 0 else 2 * tp / denom
    return accuracy, f1


def metric_record(
    method: str, scenario: str, level: float, seed: int, metrics: dict
) -> dict:
    """JSON-serializable benchmark record."""
    return {
        "method": method,
        "scenario": scenario,
        "level": level,
        "seed": seed,
        **{k: (float(v) if isinstance(v, (int, float, np.floating)) else v) for k, v in metrics.items()},
    }


def write_records(records: Sequence[dict], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")
