"""Classical graph comparison methods used as detection baselines: pairwise
distances/similarities (Frobenius, Procrustes-aligned eigenspaces, DeltaCon,
WL kernel) and whole-sequence statistics (spectral-feature inner product,
Laplacian anomaly score, CUSUM dot-product and CUSUM operator norm).

Pairwise measures plug into the average statistic of the detection module;
sequence statistics return (values, first_t) on the original timeline. Every
method carries an orientation: 'similarity' falls at a change, 'distance'
rises. Negating a distance-oriented statistic puts it on the similarity
convention used by the shared decision rule.
"""

from __future__ import annotations

import hashlib
import logging
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import linalg
from .errors import ParameterError
from .graph import DynamicNetwork, Graph, safe_degrees, sym_normalized_laplacian

log = logging.getLogger(__name__)

DEFAULT_K_SPECTRAL = 6
DEFAULT_WL_ITERATIONS = 5


@dataclass(frozen=True)
class BaselineConfig:
    k_spectral: int = DEFAULT_K_SPECTRAL
    window_half: int | None = None  # L' ; defaults to L/2 at call sites
    deltacon_epsilon: float | None = None  # None -> 1/(1 + max degree)
    wl_iterations: int = DEFAULT_WL_ITERATIONS

    def __post_init__(self):
        if self.k_spectral < 1 or self.wl_iterations < 0:
            raise ParameterError("counts must be positive")
        if self.window_half is not None and self.window_half < 1:
            raise ParameterError("window_half must be >= 1")


def _check_same_n(g1: Graph, g2: Graph) -> None:
    if g1.n != g2.n:
        raise ParameterError(f"graphs have {g1.n} and {g2.n} nodes")


def frobenius_distance(g1: Graph, g2: Graph) -> float:
    _check_same_n(g1, g2)
    return float(np.linalg.norm(g1.adjacency - g2.adjacency))


def _top_laplacian_eigenvectors(g: Graph, k: int) -> np.ndarray:
    dec = linalg.sym_eig(sym_normalized_laplacian(g.adjacency))
    return dec.eigenvectors[:, :k]


def procrustes_distance(g1: Graph, g2: Graph, k: int = DEFAULT_K_SPECTRAL) -> float:
    """Frobenius distance between the top-k normalized-Laplacian eigenvector
    matrices after the optimal orthogonal alignment of the second onto the
    first."""
    _check_same_n(g1, g2)
    if not 1 <= k <= g1.n:
        raise ParameterError(f"k={k} outside [1, n={g1.n}]")
    u1 = _top_laplacian_eigenvectors(g1, k)
    u2 = _top_laplacian_eigenvectors(g2, k)
    w, _, vt = np.linalg.svd(u2.T @ u1)
    return float(np.linalg.norm(u1 - u2 @ (w @ vt)))


def fbp_operator(g: Graph, epsilon: float) -> np.ndarray:
    """Fast-belief-propagation affinity S = (I + eps^2 D - eps A)^{-1}."""
    n = g.n
    m = np.eye(n) + epsilon**2 * np.diag(g.degrees()) - epsilon * g.adjacency
    return linalg.solve_linear(m, np.eye(n))


def deltacon_similarity(g1: Graph, g2: Graph, epsilon: float | None = None) -> float:
    """1 / (1 + Matusita distance between the FBP operators); epsilon
    defaults to 1/(1 + max degree over both graphs)."""
    _check_same_n(g1, g2)
    if epsilon is None:
        epsilon = 1.0 / (1.0 + max(g1.degrees().max(initial=0.0), g2.degrees().max(initial=0.0)))
    s1 = np.sqrt(np.clip(fbp_operator(g1, epsilon), 0.0, None))
    s2 = np.sqrt(np.clip(fbp_operator(g2, epsilon), 0.0, None))
    d = float(np.linalg.norm(s1 - s2))
    return 1.0 / (1.0 + d)


def _wl_histograms(g: Graph, iterations: int) -> Counter:
    """Counts of node labels over WL refinement rounds 0..iterations.

    Unattributed graphs start from a single constant label; neighborhoods
    ignore self-loops. Each round relabels a node by the canonical string
    (own label, sorted neighbor labels), compressed through a stable digest
    so labels stay short and comparable across independently processed
    graphs. Labels of different rounds never collide.
    """
    a = g.adjacency
    neighbors = [np.nonzero(a[i] > 0)[0] for i in range(g.n)]
    labels = ["0"] * g.n
    hist: Counter = Counter((0, l) for l in labels)
    for it in range(1, iterations + 1):
        canonical = [
            labels[i] + "|" + ",".join(sorted(labels[j] for j in neighbors[i] if j != i))
            for i in range(g.n)
        ]
        labels = [hashlib.sha1(c.encode()).hexdigest() for c in canonical]
        hist.update((it, l) for l in labels)
    return hist


def wl_kernel(g1: Graph, g2: Graph, iterations: int = DEFAULT_WL_ITERATIONS) -> float:
    """Normalized WL subtree kernel: label-histogram dot product over all
    refinement rounds, scaled to [0, 1] by the self-kernels."""
    h1 = _wl_histograms(g1, iterations)
    h2 = _wl_histograms(g2, iterations)

    def dot(a: Counter, b: Counter) -> float:
        small, big = (a, b) if len(a) <= len(b) else (b, a)
        return float(sum(c * big.get(k, 0) for k, c in small.items()))

    raw = dot(h1, h2)
    norm = np.sqrt(dot(h1, h1) * dot(h2, h2))
    return raw / norm if norm > 0 else 0.0


def sc_ncpd_statistic(
    net: DynamicNetwork, k: int = DEFAULT_K_SPECTRAL, half_window: int = 3
) -> tuple[np.ndarray, int]:
    """Per snapshot, spectral features are the sign-fixed bottom-k
    eigenvectors of the normalized Laplacian; the statistic at t is
    ||mean(backward)^T mean(forward)||_F / k over windows of `half_window`
    snapshots ending at t and starting at t+1. Low values signal a change."""
    if half_window < 1:
        raise ParameterError("half_window must be >= 1")
    T = net.T
    if T < 2 * half_window:
        raise ParameterError(f"need T >= 2*half_window, got T={T}")
    feats = []
    for g in net.snapshots:
        dec = linalg.sym_eig(sym_normalized_laplacian(g.adjacency))
        feats.append(dec.eigenvectors[:, ::-1][:, :k])
    first_t = half_window
    out = np.empty(T - 2 * half_window + 1)
    for j, t in enumerate(range(first_t, T - half_window + 1)):
        back = np.mean(feats[t - half_window : t], axis=0)
        fwd = np.mean(feats[t : t + half_window], axis=0)
        out[j] = np.linalg.norm(back.T @ fwd) / k
    return out, first_t


def lad_statistic(
    net: DynamicNetwork, k: int = DEFAULT_K_SPECTRAL, window: int = 6
) -> tuple[np.ndarray, int]:
    """1 - |<aggregate, current>| between the L2-normalized top-k singular
    values of the unnormalized Laplacian and the renormalized mean of the
    previous `window` signatures. Empty-graph signatures stay zero (score 1,
    logged)."""
    if window < 1:
        raise ParameterError("window must be >= 1")
    if net.T <= window:
        raise ParameterError(f"need T > window, got T={net.T}")

    def signature(g: Graph) -> np.ndarray:
        lap = np.diag(g.degrees()) - g.adjacency
        sv = linalg.top_singular_values(lap, min(k, g.n))
        if sv.shape[0] < k:
            sv = np.pad(sv, (0, k - sv.shape[0]))
        norm = np.linalg.norm(sv)
        if norm == 0:
            log.warning("empty-graph snapshot: zero spectral signature")
            return sv
        return sv / norm

    sigs = [signature(g) for g in net.snapshots]
    first_t = window + 1
    out = np.empty(net.T - window)
    for j, t in enumerate(range(first_t, net.T + 1)):
        agg = np.mean(sigs[t - 1 - window : t - 1], axis=0)
        norm = np.linalg.norm(agg)
        if norm > 0:
            agg = agg / norm
        out[j] = 1.0 - abs(float(agg @ sigs[t - 1]))
    return out, first_t


def _cusum_matrix(adj: Sequence[np.ndarray], t: int, half: int) -> np.ndarray:
    """(sum of the `half` matrices up to index t minus the next `half`)
    scaled by 1/sqrt(2*half); t is a 1-based index into adj."""
    back = sum(adj[s - 1] for s in range(t - half + 1, t + 1))
    fwd = sum(adj[s - 1] for s in range(t + 1, t + half + 1))
    return (back - fwd) / np.sqrt(2 * half)


def cusum_statistic(net: DynamicNetwork, half_window: int) -> tuple[np.ndarray, int]:
    """Even/odd-split CUSUM dot product.

    The sequence splits into even- and odd-timestamp subsequences; at each
    subsequence index the statistic is the Frobenius inner product between
    the odd-sample CUSUM direction (unit Frobenius norm) and the even-sample
    CUSUM matrix, 0 when the direction vanishes. Values are reported at the
    even member's original timestamp 2s.
    """
    if half_window < 1:
        raise ParameterError("half_window must be >= 1")
    if net.T < 4 * half_window:
        raise ParameterError(f"need T >= 4*half_window, got T={net.T}")
    m = net.T // 2
    even = [net.snapshot(2 * s).adjacency for s in range(1, m + 1)]
    odd = [net.snapshot(2 * s - 1).adjacency for s in range(1, m + 1)]
    first_s, last_s = half_window, m - half_window
    out = np.empty(last_s - first_s + 1)
    for j, s in enumerate(range(first_s, last_s + 1)):
        c_b = _cusum_matrix(odd, s, half_window)
        c_a = _cusum_matrix(even, s, half_window)
        norm = np.linalg.norm(c_b)
        out[j] = 0.0 if norm == 0 else float(np.sum((c_b / norm) * c_a))
    return out, 2 * first_s


def cusum2_statistic(net: DynamicNetwork, half_window: int) -> tuple[np.ndarray, int]:
    """Operator norm of the CUSUM matrix over past/future windows of
    half_window snapshots on the full sequence."""
    if half_window < 1:
        raise ParameterError("half_window must be >= 1")
    if net.T < 2 * half_window:
        raise ParameterError(f"need T >= 2*half_window, got T={net.T}")
    adj = [g.adjacency for g in net.snapshots]
    first_t, last_t = half_window, net.T - half_window
    out = np.empty(last_t - first_t + 1)
    for j, t in enumerate(range(first_t, last_t + 1)):
        out[j] = linalg.matrix_norms(_cusum_matrix(adj, t, half_window))[1]
    return out, first_t


# --- registry ---------------------------------------------------------------

PairwiseFn = Callable[[Graph, Graph], float]


@dataclass(frozen=True)
class MethodInfo:
    name: str
    kind: str  # "pairwise" | "sequence"
    orientation: str  # "similarity" | "distance"


METHODS: dict[str, MethodInfo] = {
    "frobenius": MethodInfo("frobenius", "pairwise", "distance"),
    "procrustes": MethodInfo("procrustes", "pairwise", "distance"),
    "deltacon": MethodInfo("deltacon", "pairwise", "similarity"),
    "wl": MethodInfo("wl", "pairwise", "similarity"),
    "sc-ncpd": MethodInfo("sc-ncpd", "sequence", "similarity"),
    "lad": MethodInfo("lad", "sequence", "distance"),
    "cusum": MethodInfo("cusum", "sequence", "distance"),
    "cusum2": MethodInfo("cusum2", "sequence", "distance"),
}


def pairwise_measure(name: str, config: BaselineConfig = BaselineConfig()) -> PairwiseFn:
    if name == "frobenius":
        return frobenius_distance
    if name == "procrustes":
        return lambda g1, g2: procrustes_distance(g1, g2, config.k_spectral)
    if name == "deltacon":
        return lambda g1, g2: deltacon_similarity(g1, g2, config.deltacon_epsilon)
    if name == "wl":
        return lambda g1, g2: wl_kernel(g1, g2, config.wl_iterations)
    raise ParameterError(f"{name!r} is not a pairwise baseline")


def sequence_statistic(
    name: str, net: DynamicNetwork, L: int, config: BaselineConfig = BaselineConfig()
) -> tuple[np.ndarray, int]:
    """Statistic of a whole-sequence baseline with the shared window
    convention L' = L/2 (at least 1) unless the config overrides it."""
    half = config.window_half if config.window_half is not None else max(L // 2, 1)
    if name == "sc-ncpd":
        return sc_ncpd_statistic(net, config.k_spectral, half)
    if name == "lad":
        return lad_statistic(net, config.k_spectral, L)
    if name == "cusum":
        return cusum_statistic(net, half)
    if name == "cusum2":
        return cusum2_statistic(net, half)
    raise ParameterError(f"{name!r} is not a sequence baseline")
