"""Dynamic stochastic block model generators for the four community-event
scenarios (merge, birth of a dense subgraph at varying size or density, and
membership swaps), plus labelled pair datasets for similarity training.

All sampling goes through an explicit numpy Generator; identical seeds give
bit-identical output.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ParameterError
from .graph import DynamicNetwork, Graph
from .sampling import PairDataset, PairExample

SCENARIOS = ("merge", "birth1", "birth2", "swaps")

DEFAULT_T = 100


@dataclass(frozen=True)
class SbmSpec:
    """Stochastic block model: per-node community memberships, intra-cluster
    edge probability p and inter-cluster probability q. The optional intra
    vector overrides p per community (used by the planted-subgraph
    scenarios, where the background block keeps density q)."""

    n: int
    memberships: tuple[int, ...]
    p: float
    q: float
    intra: tuple[float, ...] | None = None

    def __post_init__(self):
        if len(self.memberships) != self.n:
            raise ParameterError("memberships length must equal n")
        object.__setattr__(self, "memberships", tuple(int(c) for c in self.memberships))
        probs = [self.p, self.q, *(self.intra or ())]
        if any(not 0.0 <= x <= 1.0 for x in probs):
            raise ParameterError("edge probabilities must lie in [0, 1]")
        k = max(self.memberships) + 1 if self.memberships else 0
        if self.intra is not None and len(self.intra) != k:
            raise ParameterError("intra vector must have one entry per community")

    def intra_probs(self) -> np.ndarray:
        k = max(self.memberships) + 1
        return np.asarray(self.intra if self.intra is not None else [self.p] * k)


@dataclass(frozen=True)
class ScenarioSpec:
    """One change-point scenario at a given difficulty level.

    level means p for merge/birth2, the planted size s for birth1 and the
    swapped-pair proportion h for swaps. birth2_s overrides the planted-block
    size of birth2 (defaults to n/4, the paper's 100-of-400 ratio).
    """

    kind: str
    level: float
    n: int
    birth2_s: int | None = None

    def __post_init__(self):
        if self.kind not in SCENARIOS:
            raise ParameterError(f"unknown scenario {self.kind!r}")


def _memberships(sizes: Sequence[int]) -> tuple[int, ...]:
    out: list[int] = []
    for c, s in enumerate(sizes):
        out.extend([c] * s)
    return tuple(out)


def _equal_sizes(n: int, k: int) -> list[int]:
    base, rem = divmod(n, k)
    return [base + (1 if i < rem else 0) for i in range(k)]


def sample_sbm(spec: SbmSpec, rng: np.random.Generator) -> Graph:
    """Draw one undirected binary graph: each node pair (i < j) is an
    independent Bernoulli with its block probability; no self-loops."""
    mem = np.asarray(spec.memberships)
    intra = spec.intra_probs()
    same = mem[:, None] == mem[None, :]
    probs = np.where(same, intra[mem][:, None], spec.q)
    upper = np.triu(rng.random((spec.n, spec.n)) < probs, k=1)
    a = upper.astype(float)
    return Graph(a + a.T)


def scenario_models(spec: ScenarioSpec) -> tuple[SbmSpec, SbmSpec]:
    """The (pre, post) generating models around the scenario's change-point."""
    n = spec.n
    if spec.kind == "merge":
        pre = SbmSpec(n, _memberships(_equal_sizes(n, 4)), spec.level, 0.02)
        post = SbmSpec(n, _memberships(_equal_sizes(n, 2)), spec.level, 0.02)
        return pre, post
    if spec.kind in ("birth1", "birth2"):
        q = 0.03
        if spec.kind == "birth1":
            s, p = int(spec.level), 0.1
        else:
            s = spec.birth2_s if spec.birth2_s is not None else n // 4
            p = spec.level
        if not 0 <= s <= n // 2:
            raise ParameterError(f"planted size s={s} outside [0, n/2]")
        pre = SbmSpec(n, _memberships([n]), q, q)
        if s == 0:
            return pre, pre
        post = SbmSpec(n, _memberships([n - s, s]), p, q, intra=(q, p))
        return pre, post
    # swaps
    q, p = 0.05, 0.1
    mem = _memberships(_equal_sizes(n, 4))
    pre = SbmSpec(n, mem, p, q)
    return pre, SbmSpec(n, mem, p, q)  # post memberships drawn per sequence


def swap_memberships(
    memberships: Sequence[int], h: float, rng: np.random.Generator
) -> tuple[int, ...]:
    """Exchange the memberships of floor(h*n/2) disjoint cross-community node
    pairs, sampled uniformly; community sizes are preserved exactly."""
    mem = list(memberships)
    n = len(mem)
    n_swaps = int(np.floor(h * n / 2))
    pool = list(range(n))
    for _ in range(n_swaps):
        if len(pool) < 2:
            raise ParameterError(f"proportion h={h} leaves no swappable pairs")
        u = pool.pop(int(rng.integers(len(pool))))
        others = [v for v in pool if mem[v] != mem[u]]
        if not others:
            raise ParameterError(f"proportion h={h} leaves no swappable pairs")
        v = others[int(rng.integers(len(others)))]
        pool.remove(v)
        mem[u], mem[v] = mem[v], mem[u]
    return tuple(mem)


def generate_sequence(
    spec: ScenarioSpec,
    T: int = DEFAULT_T,
    tau: int | None = None,
    rng: np.random.Generator | None = None,
) -> DynamicNetwork:
    """Sequence of T i.i.d. snapshots with a single change at tau: timestamps
    1..tau-1 come from the pre model, tau..T from the post model. tau=None
    draws it uniformly from the middle half [T/4, 3T/4] of the sequence,
    which is [25, 75] at the default T=100."""
    rng = rng if rng is not None else np.random.default_rng()
    if tau is None:
        lo = max(2, T // 4)
        hi = max(lo, (3 * T) // 4)
        tau = int(rng.integers(lo, hi + 1))
    if not 1 < tau <= T:
        raise ParameterError(f"tau={tau} outside (1, T={T}]")
    pre, post = scenario_models(spec)
    if spec.kind == "swaps":
        post = SbmSpec(
            post.n, swap_memberships(pre.memberships, spec.level, rng), post.p, post.q
        )
    return generate_from_models(pre, post, T, tau, rng)


def generate_from_models(
    pre: SbmSpec, post: SbmSpec, T: int, tau: int, rng: np.random.Generator
) -> DynamicNetwork:
    """i.i.d. snapshots from two explicit models switching at tau."""
    if not 1 < tau <= T:
        raise ParameterError(f"tau={tau} outside (1, T={T}]")
    snaps = [sample_sbm(pre if t < tau else post, rng) for t in range(1, T + 1)]
    return DynamicNetwork(tuple(snaps), change_points=(tau,))


def generate_pair_dataset(
    spec: ScenarioSpec,
    n_pairs: int,
    rng: np.random.Generator | None = None,
) -> tuple[list[Graph], PairDataset]:
    """Balanced labelled pairs of independently sampled graphs.

    Half the pairs are drawn from one common model (pre or post, equally
    likely) and labelled 1, half from distinct models and labelled 0. The
    returned graph list holds 2*n_pairs graphs; pair i references timestamps
    (2i+1, 2i+2). The dataset records consecutive 60/20/20
    train/validation/test index ranges.
    """
    if n_pairs % 2 != 0:
        raise ParameterError("n_pairs must be even for balanced labels")
    rng = rng if rng is not None else np.random.default_rng()
    pre, post = scenario_models(spec)
    if spec.kind == "swaps":
        post = SbmSpec(
            post.n, swap_memberships(pre.memberships, spec.level, rng), post.p, post.q
        )
    labels = np.zeros(n_pairs, dtype=int)
    labels[: n_pairs // 2] = 1
    rng.shuffle(labels)
    graphs: list[Graph] = []
    pairs: list[PairExample] = []
    for i, y in enumerate(labels):
        if y == 1:
            model = pre if rng.random() < 0.5 else post
            g1, g2 = sample_sbm(model, rng), sample_sbm(model, rng)
        else:
            g1, g2 = sample_sbm(pre, rng), sample_sbm(post, rng)
            if rng.random() < 0.5:
                g1, g2 = g2, g1
        graphs.extend([g1, g2])
        pairs.append(PairExample(2 * i + 1, 2 * i + 2, int(y)))
    n_train = int(0.6 * n_pairs)
    n_val = int(0.2 * n_pairs)
    splits = {
        "train": range(0, n_train),
        "val": range(n_train, n_train + n_val),
        "test": range(n_train + n_val, n_pairs),
    }
    return graphs, PairDataset(tuple(pairs), source=f"{spec.kind}:{spec.level}", split_ranges=splits)
