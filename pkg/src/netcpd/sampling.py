"""Train/validation/test splitting of a snapshot sequence and the two
labelled pair-sampling schemes used to fit the similarity model.

A pair (t1, t2) is labelled 1 when no change-point lies in
(min(t1,t2), max(t1,t2)]: a change-point at tau means the snapshot at tau
already follows the new distribution, so a pair ending exactly on a
change-point is a negative.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ParameterError


@dataclass(frozen=True)
class PairExample:
    """Labelled pair of timestamps; label 1 = same generative segment."""

    t1: int
    t2: int
    label: int

    def __post_init__(self):
        if self.t1 == self.t2:
            raise ParameterError("a pair needs two distinct timestamps")
        if self.label not in (0, 1):
            raise ParameterError("label must be 0 or 1")


@dataclass(frozen=True)
class PairDataset:
    pairs: tuple[PairExample, ...]
    source: str = ""
    split: str = ""
    split_ranges: Mapping[str, range] | None = None

    def __len__(self) -> int:
        return len(self.pairs)

    def subset(self, name: str) -> "PairDataset":
        """Slice out one of the recorded split ranges by name."""
        if not self.split_ranges or name not in self.split_ranges:
            raise ParameterError(f"no split named {name!r} recorded")
        r = self.split_ranges[name]
        return PairDataset(self.pairs[r.start : r.stop], source=self.source, split=name)


def pair_label(t1: int, t2: int, change_points: Sequence[int]) -> int:
    lo, hi = min(t1, t2), max(t1, t2)
    return 0 if any(lo < tau <= hi for tau in change_points) else 1


def split_sequence(T: int, fractions: tuple[float, float, float]) -> tuple[range, range, range]:
    """Three consecutive 1-based timestamp ranges covering [1, T].

    Train and validation sizes are floored; the remainder goes to test.
    """
    if T < 3:
        raise ParameterError(f"cannot split T={T} < 3 timestamps")
    if len(fractions) != 3 or any(f <= 0 for f in fractions):
        raise ParameterError("fractions must be three positive numbers")
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise ParameterError("fractions must sum to 1")
    n_train = int(np.floor(fractions[0] * T))
    n_val = int(np.floor(fractions[1] * T))
    if n_train == 0 or n_val == 0 or n_train + n_val >= T:
        raise ParameterError("fractions leave an empty split for this T")
    return (
        range(1, n_train + 1),
        range(n_train + 1, n_train + n_val + 1),
        range(n_train + n_val + 1, T + 1),
    )


def random_scheme(
    timestamps: range,
    change_points: Sequence[int],
    n_pairs: int | None = None,
    rng: np.random.Generator | None = None,
    source: str = "",
) -> PairDataset:
    """Balanced uniform sample of labelled pairs from within a range.

    Draws n_pairs/2 positive and n_pairs/2 negative unordered pairs without
    replacement from all pairs inside `timestamps`. n_pairs defaults to the
    10*T heuristic for the range length.
    """
    rng = rng if rng is not None else np.random.default_rng()
    ts = list(timestamps)
    if n_pairs is None:
        n_pairs = 10 * len(ts)
    if n_pairs % 2 != 0 or n_pairs < 0:
        raise ParameterError("n_pairs must be a nonnegative even number")
    positives, negatives = [], []
    for a in range(len(ts)):
        for b in range(a + 1, len(ts)):
            t1, t2 = ts[a], ts[b]
            (positives if pair_label(t1, t2, change_points) else negatives).append((t1, t2))
    half = n_pairs // 2
    for name, cand in (("1", positives), ("0", negatives)):
        if len(cand) < half:
            raise ParameterError(
                f"only {len(cand)} candidate pairs with label {name}, need {half}"
            )
    chosen: list[PairExample] = []
    for label, cand in ((1, positives), (0, negatives)):
        idx = rng.choice(len(cand), size=half, replace=False)
        chosen.extend(PairExample(*cand[i], label) for i in sorted(idx))
    return PairDataset(tuple(chosen), source=source, split="train")


def windowed_scheme(
    timestamps: range,
    change_points: Sequence[int],
    L: int,
    t_min: int = 1,
    source: str = "",
) -> PairDataset:
    """Every pair (t - i, t) with t in the range and 1 <= i <= L.

    The earlier timestamp may reach back before the range start (clipped at
    t_min, the first timestamp of the sequence), mirroring how the detection
    statistic pairs each snapshot with its L predecessors.
    """
    if L < 1:
        raise ParameterError("window L must be >= 1")
    pairs = [
        PairExample(t - i, t, pair_label(t - i, t, change_points))
        for t in timestamps
        for i in range(1, L + 1)
        if t - i >= t_min
    ]
    return PairDataset(tuple(pairs), source=source, split="val")


def validation_interval(
    T: int,
    change_points: Sequence[int],
    size: int = 60,
    rng: np.random.Generator | None = None,
) -> range:
    """Window of `size` timestamps centred on a uniformly drawn ground-truth
    change-point, clipped to [1, T]."""
    if not change_points:
        raise ParameterError("validation interval needs at least one change-point")
    rng = rng if rng is not None else np.random.default_rng()
    tau = int(change_points[int(rng.integers(len(change_points)))])
    lo = max(1, tau - size // 2)
    hi = min(T, lo + size - 1)
    lo = max(1, hi - size + 1)
    return range(lo, hi + 1)


def write_pairs_csv(dataset: PairDataset, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t1", "t2", "label"])
        for p in dataset.pairs:
            writer.writerow([p.t1, p.t2, p.label])


def read_pairs_csv(path, source: str = "", split: str = "") -> PairDataset:
    with open(path, "r", newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["t1", "t2", "label"]:
        raise ParameterError(f"{path}: expected header t1,t2,label")
    pairs = tuple(PairExample(int(r[0]), int(r[1]), int(r[2])) for r in rows[1:])
    return PairDataset(pairs, source=source, split=split)
