"""Self-supervised change-point pre-estimation for correlation-matrix
sequences, plus the eigen-entropy diagnostic.

Three steps: cluster the nodes of every correlation matrix with signed
spectral clustering, compare the per-snapshot partitions pairwise with the
adjusted Rand index, cluster the snapshots on that similarity matrix, then
smooth the snapshot labels into contiguous segments whose boundaries are the
pre-estimated change-points.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from sklearn.cluster import KMeans
from sklearn.metrics import silhouette_score

from . import linalg
from .errors import DimensionError, ParameterError

KMEANS_RESTARTS = 10
KMEANS_MAX_ITER = 100


@dataclass(frozen=True)
class Partition:
    """Cluster assignment per element, indices in [0, k)."""

    assignments: tuple[int, ...]
    k: int

    def __post_init__(self):
        if any(not 0 <= a < self.k for a in self.assignments):
            raise ParameterError("assignments must lie in [0, k)")
        object.__setattr__(self, "assignments", tuple(int(a) for a in self.assignments))


def _kmeans(embedding: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    seed = int(rng.integers(2**31 - 1))
    km = KMeans(
        n_clusters=k, init="k-means++", n_init=KMEANS_RESTARTS,
        max_iter=KMEANS_MAX_ITER, random_state=seed,
    )
    return km.fit_predict(embedding)


def signed_spectral_embedding(c: np.ndarray, k: int) -> np.ndarray:
    """Rows of the k smallest-eigenvalue eigenvectors of the symmetric signed
    Laplacian D^{-1/2} (D - C) D^{-1/2}, D = diag(sum_j |C_ij|)."""
    c = np.asarray(c, dtype=float)
    d = np.abs(c).sum(axis=1)
    d = np.where(d > 0, d, 1.0)
    inv_sqrt = 1.0 / np.sqrt(d)
    lap = np.diag(d) - c
    lap = lap * inv_sqrt[:, None] * inv_sqrt[None, :]
    dec = linalg.sym_eig((lap + lap.T) / 2.0)
    return dec.eigenvectors[:, ::-1][:, :k].copy()


def signed_spectral_clustering(c: np.ndarray, k: int, rng: np.random.Generator) -> Partition:
    """Cluster nodes of a signed correlation matrix into k groups via the
    signed-Laplacian embedding and seeded k-means."""
    c = np.asarray(c, dtype=float)
    n = c.shape[0]
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise DimensionError("correlation matrix must be square")
    if not 2 <= k <= n:
        raise ParameterError(f"k={k} outside [2, n={n}]")
    if k == n:
        return Partition(tuple(range(n)), n)
    labels = _kmeans(signed_spectral_embedding(c, k), k, rng)
    return Partition(tuple(int(l) for l in labels), k)


def silhouette_select_k(
    c: np.ndarray, candidates: Sequence[int], rng: np.random.Generator
) -> int:
    """Candidate k with the highest mean silhouette coefficient of the
    signed spectral clustering, Euclidean distances in the embedding; ties
    take the smallest k."""
    cands = sorted(set(int(k) for k in candidates))
    if not cands:
        raise ParameterError("empty candidate range")
    if len(cands) == 1:
        return cands[0]
    best_k, best_score = cands[0], -np.inf
    for k in cands:
        emb = signed_spectral_embedding(np.asarray(c, dtype=float), k)
        labels = np.asarray(signed_spectral_clustering(c, k, rng).assignments)
        if len(set(labels.tolist())) < 2:
            continue
        score = float(silhouette_score(emb, labels))
        if score > best_score + 1e-12:
            best_k, best_score = k, score
    return best_k


def select_global_k(
    mats: Sequence[np.ndarray], candidates: Sequence[int], rng: np.random.Generator
) -> int:
    """One cluster count for a whole matrix sequence: the candidate with the
    highest mean silhouette across all matrices."""
    cands = sorted(set(int(k) for k in candidates))
    if not cands:
        raise ParameterError("empty candidate range")
    if len(cands) == 1:
        return cands[0]
    means = []
    for k in cands:
        scores = []
        for c in mats:
            emb = signed_spectral_embedding(np.asarray(c, dtype=float), k)
            labels = np.asarray(signed_spectral_clustering(c, k, rng).assignments)
            if len(set(labels.tolist())) < 2:
                continue
            scores.append(float(silhouette_score(emb, labels)))
        means.append(np.mean(scores) if scores else -np.inf)
    return cands[int(np.argmax(means))]


def ari(p1: Partition, p2: Partition) -> float:
    """Adjusted Rand index via the contingency-table closed form."""
    a1 = np.asarray(p1.assignments)
    a2 = np.asarray(p2.assignments)
    if a1.shape != a2.shape:
        raise ParameterError("partitions cover different element counts")
    n = a1.size
    table = np.zeros((p1.k, p2.k), dtype=np.int64)
    np.add.at(table, (a1, a2), 1)

    def comb2(x):
        return x * (x - 1) / 2.0

    sum_cells = comb2(table.astype(float)).sum()
    sum_rows = comb2(table.sum(axis=1).astype(float)).sum()
    sum_cols = comb2(table.sum(axis=0).astype(float)).sum()
    total = comb2(float(n))
    expected = sum_rows * sum_cols / total if total > 0 else 0.0
    max_index = (sum_rows + sum_cols) / 2.0
    if max_index == expected:
        return 1.0
    return float((sum_cells - expected) / (max_index - expected))


def snapshot_similarity_matrix(partitions: Sequence[Partition]) -> np.ndarray:
    """Symmetric T x T matrix of pairwise ARI values, unit diagonal."""
    if not partitions:
        raise ParameterError("no partitions given")
    T = len(partitions)
    sim = np.eye(T)
    for i in range(T):
        for j in range(i + 1, T):
            sim[i, j] = sim[j, i] = ari(partitions[i], partitions[j])
    return sim


def cluster_snapshots(
    sim: np.ndarray, c_clusters: int, rng: np.random.Generator
) -> tuple[int, ...]:
    """Normalized spectral clustering of snapshots on an affinity matrix.

    Negative similarities (ARI can dip below 0) are clipped to 0 before
    building the symmetric normalized Laplacian.
    """
    sim = np.asarray(sim, dtype=float)
    T = sim.shape[0]
    if sim.ndim != 2 or sim.shape[0] != sim.shape[1]:
        raise DimensionError("similarity matrix must be square")
    if np.max(np.abs(sim - sim.T)) > 1e-10:
        raise DimensionError("similarity matrix must be symmetric")
    if not 1 <= c_clusters <= T:
        raise ParameterError(f"c_clusters={c_clusters} outside [1, T={T}]")
    if c_clusters == 1:
        return tuple([0] * T)
    affinity = np.clip(sim, 0.0, None)
    d = affinity.sum(axis=1)
    d = np.where(d > 0, d, 1.0)
    inv_sqrt = 1.0 / np.sqrt(d)
    lap = np.eye(T) - affinity * inv_sqrt[:, None] * inv_sqrt[None, :]
    dec = linalg.sym_eig((lap + lap.T) / 2.0)
    emb = dec.eigenvectors[:, ::-1][:, :c_clusters]
    labels = _kmeans(emb, c_clusters, rng)
    return tuple(int(l) for l in labels)


def smooth_labels_to_changepoints(labels: Sequence) -> list[int]:
    """Relabel each snapshot to the label whose centroid timestamp is
    nearest (ties to the earlier centroid), then report the 1-based
    timestamps where the smoothed sequence switches value."""
    labels = list(labels)
    if not labels:
        raise ParameterError("empty label sequence")
    centroids: dict = {}
    for lab in sorted(set(labels), key=lambda l: labels.index(l)):
        ts = [t for t, l in enumerate(labels, start=1) if l == lab]
        centroids[lab] = float(np.mean(ts))
    ordered = sorted(centroids.items(), key=lambda kv: kv[1])
    smoothed = []
    for t in range(1, len(labels) + 1):
        best = min(ordered, key=lambda kv: (abs(t - kv[1]), kv[1]))
        smoothed.append(best[0])
    return [t for t in range(2, len(labels) + 1) if smoothed[t - 1] != smoothed[t - 2]]


def eigen_entropy(c: np.ndarray) -> float:
    """Shannon entropy of the L1-normalized principal eigenvector (largest
    eigenvalue) of a symmetric matrix."""
    c = np.asarray(c, dtype=float)
    if not np.any(c):
        raise ParameterError("eigen-entropy of the zero matrix is undefined")
    dec = linalg.sym_eig(c)
    v = np.abs(dec.eigenvectors[:, 0])
    p = v / v.sum()
    nz = p[p > 0]
    return float(-(nz * np.log(nz)).sum())


def pre_estimate_change_points(
    mats: Sequence[np.ndarray],
    k: int | None,
    c_clusters: int,
    rng: np.random.Generator,
    k_candidates: Sequence[int] | None = None,
) -> list[int]:
    """Full three-step pipeline on a correlation-matrix sequence. Give
    either a fixed per-matrix cluster count k or a silhouette candidate
    range."""
    if k is None:
        if not k_candidates:
            raise ParameterError("need k or a candidate range")
        k = select_global_k(mats, k_candidates, rng)
    partitions = [signed_spectral_clustering(c, k, rng) for c in mats]
    sim = snapshot_similarity_matrix(partitions)
    labels = cluster_snapshots(sim, c_clusters, rng)
    return smooth_labels_to_changepoints(labels)


def write_change_points(change_points: Sequence[int], path) -> None:
    """Pre-estimated change-points as a JSON array, consumable as the
    change_points field of the network format."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump([int(t) for t in change_points], fh)
