"""Dynamic correlation networks from multivariate time-series panels.

The panel is segmented into non-overlapping windows, one Pearson correlation
matrix per full window; graphs come out either by global quantile truncation
(extreme correlations become edges, self-loops kept) or by absolute-value
thresholding (diagonal dropped). Node attributes are standardized against
their pooled mean/std across all snapshots.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionError, ParameterError, ParseError
from .graph import Graph

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TimeSeriesPanel:
    """n series of m observations; series become nodes downstream."""

    values: np.ndarray
    attributes: tuple[np.ndarray, ...] | None = None  # one n x d matrix per window

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2:
            raise DimensionError("panel values must be an n x m matrix")
        if not np.all(np.isfinite(v)):
            raise ParameterError("panel contains missing or non-finite values")
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def m(self) -> int:
        return self.values.shape[1]


def windowed_correlations(panel: TimeSeriesPanel, window: int) -> list[np.ndarray]:
    """One Pearson correlation matrix per full non-overlapping window.

    Zero-variance series get zero correlation with everything (diagonal
    stays 1); population normalization, which cancels in the ratio.
    """
    if window < 2:
        raise ParameterError("window must be >= 2")
    if panel.m < window:
        raise ParameterError(f"panel has {panel.m} observations < window {window}")
    out = []
    for start in range(0, panel.m - window + 1, window):
        block = panel.values[:, start : start + window]
        centered = block - block.mean(axis=1, keepdims=True)
        std = np.sqrt((centered**2).mean(axis=1))
        safe = np.where(std > 0, std, 1.0)
        normed = centered / safe[:, None]
        c = (normed @ normed.T) / window
        dead = std == 0
        c[dead, :] = 0.0
        c[:, dead] = 0.0
        np.fill_diagonal(c, 1.0)
        out.append(np.clip(c, -1.0, 1.0))
    return out


def quantile_truncate(
    mats: Sequence[np.ndarray], q_low: float, q_high: float
) -> list[Graph]:
    """Edges where an entry falls strictly below the pooled q_low quantile or
    strictly above the pooled q_high quantile, over all entries of all
    matrices (diagonal included); self-loops are retained."""
    if not mats:
        raise ParameterError("quantile_truncate needs at least one matrix")
    if not 0.0 <= q_low < q_high <= 1.0:
        raise ParameterError("need 0 <= q_low < q_high <= 1")
    pooled = np.concatenate([np.asarray(m, dtype=float).ravel() for m in mats])
    lo = np.quantile(pooled, q_low)
    hi = np.quantile(pooled, q_high)
    graphs = []
    for m in mats:
        a = ((m < lo) | (m > hi)).astype(float)
        graphs.append(Graph(np.maximum(a, a.T)))
    return graphs


def threshold_binarize(mats: Sequence[np.ndarray], eta: float) -> list[Graph]:
    """Edge iff |entry| > eta; the diagonal is dropped (|1| > eta would make
    self-loops universal and uninformative here)."""
    if eta < 0:
        raise ParameterError("eta must be >= 0")
    graphs = []
    for m in mats:
        a = (np.abs(np.asarray(m, dtype=float)) > eta).astype(float)
        np.fill_diagonal(a, 0.0)
        graphs.append(Graph(np.maximum(a, a.T)))
    return graphs


def standardize_attributes(attrs: Sequence[np.ndarray]) -> list[np.ndarray]:
    """Center and scale each attribute column by its pooled mean and
    population standard deviation across all timestamps and nodes.

    Zero-variance columns are left centered (scale 1) with a logged warning.
    """
    if not attrs:
        raise ParameterError("no attribute matrices given")
    stacked = np.concatenate([np.asarray(a, dtype=float) for a in attrs], axis=0)
    if stacked.ndim != 2:
        raise DimensionError("attribute matrices must be 2-d")
    mean = stacked.mean(axis=0)
    std = np.sqrt(((stacked - mean) ** 2).mean(axis=0))
    dead = std == 0
    if np.any(dead):
        log.warning("attribute column(s) %s have zero pooled variance", np.nonzero(dead)[0])
    scale = np.where(dead, 1.0, std)
    return [(np.asarray(a, dtype=float) - mean) / scale for a in attrs]


def read_series_csv(path) -> TimeSeriesPanel:
    """Panel CSV: one row per series, comma-separated real values."""
    rows = []
    with open(path, "r", newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row:
                continue
            try:
                rows.append([float(x) for x in row])
            except ValueError as exc:
                raise ParseError(lineno, str(exc)) from None
    if not rows:
        raise ParameterError(f"{path}: no series found")
    width = len(rows[0])
    for i, r in enumerate(rows):
        if len(r) != width:
            raise ParseError(i + 1, f"row has {len(r)} values, expected {width}")
    return TimeSeriesPanel(np.asarray(rows))


def read_attributes_long_csv(path, T: int, n: int) -> list[np.ndarray]:
    """Long-format attribute CSV with header t,node,<attr names...>; returns
    one n x d matrix per timestamp 1..T."""
    with open(path, "r", newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or len(rows[0]) < 3 or rows[0][0] != "t" or rows[0][1] != "node":
        raise ParseError(1, "expected header starting with t,node")
    d = len(rows[0]) - 2
    out = [np.full((n, d), np.nan) for _ in range(T)]
    for lineno, row in enumerate(rows[1:], start=2):
        try:
            t, node = int(row[0]), int(row[1])
            vals = [float(x) for x in row[2:]]
            out[t - 1][node] = vals
        except (ValueError, IndexError) as exc:
            raise ParseError(lineno, str(exc)) from None
    for t, mat in enumerate(out, start=1):
        if np.any(np.isnan(mat)):
            raise ParameterError(f"attributes missing for timestamp {t}")
    return out
