"""Graph snapshots, dynamic networks, positional encodings and the JSONL
on-disk format.

Snapshots share a fixed, consistently ordered node set; timestamps are
1-based throughout the public API. Degrees of isolated nodes are replaced
by 1 wherever an inverse degree is needed, which leaves the corresponding
rows null instead of dividing by zero.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import linalg
from .errors import DimensionError, ParameterError, ParseError

ADJACENCY_SYM_TOL = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class Graph:
    """One snapshot: symmetric nonnegative adjacency plus optional node
    attributes (n x d)."""

    adjacency: np.ndarray
    attributes: np.ndarray | None = None

    def __post_init__(self):
        a = np.asarray(self.adjacency, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionError(f"adjacency must be square, got {a.shape}")
        if a.size and np.max(np.abs(a - a.T)) > ADJACENCY_SYM_TOL:
            raise DimensionError("adjacency is not symmetric")
        if a.size and np.min(a) < 0:
            raise ParameterError("adjacency entries must be nonnegative")
        object.__setattr__(self, "adjacency", _frozen(a))
        if self.attributes is not None:
            e = np.asarray(self.attributes, dtype=float)
            if e.ndim != 2 or e.shape[0] != a.shape[0]:
                raise DimensionError(
                    f"attributes must be n x d with n={a.shape[0]}, got {e.shape}"
                )
            object.__setattr__(self, "attributes", _frozen(e))

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    def degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1)


@dataclass(frozen=True)
class DynamicNetwork:
    """Ordered snapshots over a fixed node set, with optional ground-truth
    change-points (1-based, strictly increasing, in (1, T]) and per-snapshot
    labels."""

    snapshots: tuple[Graph, ...]
    change_points: tuple[int, ...] | None = None
    labels: tuple | None = None

    def __post_init__(self):
        snaps = tuple(self.snapshots)
        if not snaps:
            raise ParameterError("a dynamic network needs at least one snapshot")
        n = snaps[0].n
        for i, g in enumerate(snaps):
            if g.n != n:
                raise DimensionError(f"snapshot {i + 1} has {g.n} nodes, expected {n}")
        object.__setattr__(self, "snapshots", snaps)
        if self.change_points is not None:
            cps = tuple(int(t) for t in self.change_points)
            if any(b <= a for a, b in zip(cps, cps[1:])):
                raise ParameterError("change_points must be strictly increasing")
            if cps and (cps[0] <= 1 or cps[-1] > len(snaps)):
                raise ParameterError("change_points must lie strictly inside (1, T]")
            object.__setattr__(self, "change_points", cps)
        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != len(snaps):
                raise DimensionError("labels length must equal T")
            object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.snapshots[0].n

    @property
    def T(self) -> int:
        return len(self.snapshots)

    def snapshot(self, t: int) -> Graph:
        """Snapshot at 1-based timestamp t."""
        if not 1 <= t <= self.T:
            raise ParameterError(f"timestamp {t} outside [1, {self.T}]")
        return self.snapshots[t - 1]


@dataclass(frozen=True)
class EncodingKind:
    """Positional-encoding choice: degree | randomwalk | laplacian | identity,
    with dimension k for the parameterized kinds."""

    kind: str
    k: int = 1

    _KINDS = ("degree", "randomwalk", "laplacian", "identity")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise ParameterError(f"unknown encoding kind {self.kind!r}")
        if self.kind in ("randomwalk", "laplacian") and self.k < 1:
            raise ParameterError("encoding dimension k must be >= 1")

    @classmethod
    def degree(cls) -> "EncodingKind":
        return cls("degree")

    @classmethod
    def random_walk(cls, k: int) -> "EncodingKind":
        return cls("randomwalk", k)

    @classmethod
    def laplacian(cls, k: int) -> "EncodingKind":
        return cls("laplacian", k)

    @classmethod
    def identity(cls) -> "EncodingKind":
        return cls("identity")

    @classmethod
    def parse(cls, spec: str) -> "EncodingKind":
        """Parse 'degree', 'identity', 'randomwalk:K' or 'laplacian:K'."""
        name, _, arg = spec.partition(":")
        name = name.strip().lower()
        if name in ("degree", "identity"):
            return cls(name)
        if name in ("randomwalk", "laplacian"):
            return cls(name, int(arg) if arg else 8)
        raise ParameterError(f"unknown encoding spec {spec!r}")

    def dim(self, n: int) -> int:
        if self.kind == "degree":
            return 1
        if self.kind == "identity":
            return n
        return self.k


def normalized_augmented_adjacency(g: Graph) -> np.ndarray:
    """D~^{-1/2} (A + I) D~^{-1/2} with D~ the augmented degree matrix."""
    a = g.adjacency + np.eye(g.n)
    inv_sqrt = 1.0 / np.sqrt(a.sum(axis=1))
    return a * inv_sqrt[:, None] * inv_sqrt[None, :]


def safe_degrees(a: np.ndarray) -> np.ndarray:
    """Row sums with zeros replaced by 1, for inverse-degree scaling."""
    d = a.sum(axis=1)
    return np.where(d > 0, d, 1.0)


def sym_normalized_laplacian(a: np.ndarray) -> np.ndarray:
    """I - D^{-1/2} A D^{-1/2}, isolated nodes handled by the degree rule."""
    inv_sqrt = 1.0 / np.sqrt(safe_degrees(a))
    return np.eye(a.shape[0]) - a * inv_sqrt[:, None] * inv_sqrt[None, :]


def is_connected(a: np.ndarray) -> bool:
    n = a.shape[0]
    seen = np.zeros(n, dtype=bool)
    stack = [0]
    seen[0] = True
    while stack:
        i = stack.pop()
        for j in np.nonzero(a[i] > 0)[0]:
            if not seen[j]:
                seen[j] = True
                stack.append(int(j))
    return bool(seen.all())


def positional_encoding(g: Graph, kind: EncodingKind) -> np.ndarray:
    """Synthetic node features for unattributed graphs.

    degree: n x 1 column of degrees. randomwalk: row i holds the first k
    return probabilities (R^j)_ii of the random-walk operator R = A D^{-1}.
    laplacian: the k eigenvectors of the symmetric normalized Laplacian with
    smallest eigenvalues, skipping the constant one when the graph is
    connected. identity: I_n.
    """
    a = g.adjacency
    n = g.n
    if kind.kind == "degree":
        return a.sum(axis=1)[:, None]
    if kind.kind == "identity":
        return np.eye(n)
    if kind.kind == "randomwalk":
        r = a / safe_degrees(a)[None, :]
        out = np.empty((n, kind.k))
        power = np.eye(n)
        for j in range(kind.k):
            power = power @ r
            out[:, j] = np.diag(power)
        return out
    # laplacian
    skip = 1 if is_connected(a) else 0
    if kind.k + skip > n:
        raise ParameterError(
            f"laplacian encoding needs k <= {n - skip} for this graph, got k={kind.k}"
        )
    dec = linalg.sym_eig(sym_normalized_laplacian(a))
    cols = dec.eigenvectors[:, ::-1]  # ascending eigenvalue order
    return cols[:, skip : skip + kind.k].copy()


def permute(g: Graph, sigma: Sequence[int]) -> Graph:
    """Relabel nodes: node i of the result is node sigma[i] of the input."""
    perm = np.asarray(sigma, dtype=int)
    if perm.shape != (g.n,) or sorted(perm.tolist()) != list(range(g.n)):
        raise ParameterError("sigma must be a bijection on [n]")
    a = g.adjacency[np.ix_(perm, perm)]
    attrs = g.attributes[perm] if g.attributes is not None else None
    return Graph(a, attrs)


# ---------------------------------------------------------------------------
# Dynamic network JSONL format.
#
# Line 1 (header): {"n": int, "T": int, "change_points": [...]?, "labels":
# [...]?, "meta": {...}?}. Line t+1: {"t": t, "edges": [[i, j], ...], "attrs":
# [[...], ...]?} with 0-based i <= j (self-loops as [i, i]). Binary graphs
# only; attribute floats round-trip bit-exactly through JSON repr.
# ---------------------------------------------------------------------------


def _edges_of(a: np.ndarray) -> list[list[int]]:
    if not np.all((a == 0.0) | (a == 1.0)):
        raise ParameterError("JSONL format stores binary adjacencies only")
    i, j = np.nonzero(np.triu(a))
    return [[int(x), int(y)] for x, y in zip(i, j)]


def write_network(net: DynamicNetwork, path, meta: dict | None = None) -> None:
    header: dict = {"n": net.n, "T": net.T}
    if net.change_points is not None:
        header["change_points"] = list(net.change_points)
    if net.labels is not None:
        header["labels"] = list(net.labels)
    if meta:
        header["meta"] = meta
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(header) + "\n")
        for t, g in enumerate(net.snapshots, start=1):
            rec: dict = {"t": t, "edges": _edges_of(g.adjacency)}
            if g.attributes is not None:
                rec["attrs"] = g.attributes.tolist()
            fh.write(json.dumps(rec) + "\n")


def read_network(path) -> DynamicNetwork:
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ParseError(1, "empty network file")
    try:
        header = json.loads(lines[0])
        n, T = int(header["n"]), int(header["T"])
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ParseError(1, f"bad header: {exc}") from None
    if len(lines) != T + 1:
        raise ParseError(len(lines), f"expected {T} snapshot lines, got {len(lines) - 1}")
    snapshots = []
    for t in range(1, T + 1):
        try:
            rec = json.loads(lines[t])
            if int(rec["t"]) != t:
                raise ValueError(f"out-of-order timestamp {rec['t']}")
            a = np.zeros((n, n))
            for i, j in rec["edges"]:
                a[i, j] = 1.0
                a[j, i] = 1.0
            attrs = rec.get("attrs")
            snapshots.append(Graph(a, np.asarray(attrs, dtype=float) if attrs is not None else None))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError, IndexError) as exc:
            raise ParseError(t + 1, str(exc)) from None
    cps = header.get("change_points")
    labels = header.get("labels")
    return DynamicNetwork(
        tuple(snapshots),
        tuple(cps) if cps is not None else None,
        tuple(labels) if labels is not None else None,
    )
