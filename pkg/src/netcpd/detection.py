"""Online and offline change-point statistics and decision rules on top of
any graph similarity function.

The average-similarity statistic Z_t is the mean score between the snapshot
at t and its L predecessors, defined for t = L+1..T. The online rule fires
at t when Z_t drops to or below the threshold after a run of above-threshold
values covering the preceding window (the available prefix for t <= 2L, at
least one value); that run requirement also re-arms the rule after each
declaration, so one change cannot emit a burst.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ParameterError
from .evaluation import adjusted_f1
from .graph import DynamicNetwork, Graph

log = logging.getLogger(__name__)

ScoreFn = Callable[[Graph, Graph], float]


@dataclass(frozen=True)
class DetectionTrace:
    """Statistic values (values[j] belongs to timestamp first_t + stride*j;
    stride 2 covers statistics on an even/odd-split timeline), the window and
    threshold that produced them, and the declared change-points."""

    values: np.ndarray
    first_t: int
    window: int
    threshold: float
    declared: tuple[int, ...]
    stride: int = 1

    def write_csv(self, path) -> None:
        declared = set(self.declared)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "z", "declared"])
            for j, z in enumerate(self.values):
                t = self.first_t + self.stride * j
                writer.writerow([t, repr(float(z)), int(t in declared)])


def similarity_statistic(score_fn: ScoreFn, net: DynamicNetwork, L: int) -> np.ndarray:
    """Z_t = (1/L) sum_{i=1..L} score(G_t, G_{t-i}) for t = L+1..T."""
    if L < 1:
        raise ParameterError("window L must be >= 1")
    if net.T <= L:
        raise ParameterError(f"need T > L, got T={net.T}, L={L}")
    out = np.empty(net.T - L)
    for j, t in enumerate(range(L + 1, net.T + 1)):
        out[j] = np.mean(
            [score_fn(net.snapshot(t), net.snapshot(t - i)) for i in range(1, L + 1)]
        )
    return out


def detect_online(
    z: Sequence[float], L: int, theta: float, first_t: int | None = None, stride: int = 1
) -> list[int]:
    """Timestamps where the statistic crosses below theta after an
    above-theta run covering the preceding L statistic values.

    z[j] is the statistic at timestamp first_t + stride*j (default L+1,
    stride 1). For early timestamps with fewer than L prior values, the
    available prefix is required instead; it must be nonempty. Decisions at
    t use values up to t only.
    """
    z = np.asarray(z, dtype=float)
    start = first_t if first_t is not None else L + 1
    declared = []
    for j in range(len(z)):
        lo = max(0, j - L)
        prefix = z[lo:j]
        if prefix.size and np.all(prefix > theta) and z[j] <= theta:
            declared.append(start + stride * j)
    return declared


def localize_single_offline(
    z: Sequence[float], mode: str = "argmin", first_t: int = 1, stride: int = 1
) -> int:
    """Offline single change-point estimate: the timestamp of the smallest
    statistic value ('argmin') or of the largest one-step jump
    ('max_increment'); ties resolve to the earliest timestamp."""
    z = np.asarray(z, dtype=float)
    if mode == "argmin":
        if z.size < 1:
            raise ParameterError("argmin needs a nonempty statistic")
        return first_t + stride * int(np.argmin(z))
    if mode == "max_increment":
        if z.size < 2:
            raise ParameterError("max_increment needs at least two values")
        return first_t + stride * (1 + int(np.argmax(np.abs(np.diff(z)))))
    raise ParameterError(f"unknown localisation mode {mode!r}")


def mmd_statistic(score_fn: ScoreFn, net: DynamicNetwork, L: int) -> tuple[np.ndarray, int]:
    """Forward-window two-sample statistic between the L+1 snapshots before t
    and the L+1 snapshots from t on.

    Returns (values, first_t) with first_t = L+2; values cover
    t = L+2..T-L, the full index-valid range. A slightly negative radicand
    from finite-sample noise is clamped to 0.
    """
    if L < 1:
        raise ParameterError("window L must be >= 1")
    T = net.T
    first_t = L + 2
    last_t = T - L
    if last_t < first_t:
        raise ParameterError(f"window L={L} overruns a sequence of T={T}")

    def s(a: int, b: int) -> float:
        return score_fn(net.snapshot(a), net.snapshot(b))

    out = np.empty(last_t - first_t + 1)
    for j, t in enumerate(range(first_t, last_t + 1)):
        total = 0.0
        for i in range(1, L + 2):
            for k in range(1, L + 2):
                total += s(t - i, t - k) + s(t - 1 + i, t - 1 + k) - s(t - i, t - 1 + k)
        out[j] = np.sqrt(max(total / (L * (L + 1)), 0.0))
    return out, first_t


def calibrate_threshold(
    z_validation: Sequence[float],
    true_change_points: Sequence[int],
    L: int,
    T: int,
    first_t: int | None = None,
    stride: int = 1,
    tolerance: int = 5,
) -> float:
    """Threshold maximizing the adjusted F1 of detect_online on a labelled
    validation trace, swept over midpoints of consecutive sorted unique
    statistic values; ties take the smallest threshold."""
    z = np.asarray(z_validation, dtype=float)
    if z.size == 0:
        raise ParameterError("empty validation trace")
    if not true_change_points:
        raise ParameterError("calibration needs at least one labelled change-point")
    uniq = np.unique(z)
    if uniq.size == 1:
        log.warning("constant validation statistic; threshold calibration is vacuous")
        return float(uniq[0])
    candidates = (uniq[:-1] + uniq[1:]) / 2.0
    best_theta, best_f1 = None, -1.0
    for theta in candidates:
        declared = detect_online(z, L, float(theta), first_t=first_t, stride=stride)
        score = adjusted_f1(declared, true_change_points, T, tol=tolerance)
        if score.f1 > best_f1 + 1e-15:
            best_theta, best_f1 = float(theta), score.f1
    if best_f1 <= 0.0:
        log.warning("no threshold achieves positive F1 on the validation trace")
        return float(candidates[0])
    return best_theta


def run_detection(
    z: Sequence[float], L: int, theta: float, first_t: int | None = None, stride: int = 1
) -> DetectionTrace:
    start = first_t if first_t is not None else L + 1
    declared = detect_online(z, L, theta, first_t=start, stride=stride)
    return DetectionTrace(np.asarray(z, dtype=float), start, L, theta, tuple(declared), stride)
