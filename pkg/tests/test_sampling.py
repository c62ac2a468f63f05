import itertools

import numpy as np
import pytest

from netcpd.errors import ParameterError
from netcpd.sampling import (
    PairDataset,
    PairExample,
    pair_label,
    random_scheme,
    read_pairs_csv,
    split_sequence,
    validation_interval,
    windowed_scheme,
    write_pairs_csv,
)


def brute_force_label(t1, t2, cps):
    lo, hi = min(t1, t2), max(t1, t2)
    return 0 if any(lo < c <= hi for c in cps) else 1


def test_split_sequence_examples():
    tr, va, te = split_sequence(10, (0.5, 0.2, 0.3))
    assert (list(tr), list(va), list(te)) == (
        list(range(1, 6)), list(range(6, 8)), list(range(8, 11))
    )
    tr, va, te = split_sequence(100, (0.5, 0.2, 0.3))
    assert (len(tr), len(va), len(te)) == (50, 20, 30)
    with pytest.raises(ParameterError):
        split_sequence(10, (1.0, 0.0, 0.0))
    with pytest.raises(ParameterError):
        split_sequence(2, (0.5, 0.2, 0.3))
    with pytest.raises(ParameterError):
        split_sequence(10, (0.5, 0.2, 0.2))


def test_pair_label_boundary():
    # a change-point exactly at t2 makes the pair negative
    assert pair_label(3, 6, [6]) == 0
    assert pair_label(6, 9, [6]) == 1
    assert pair_label(9, 6, [6]) == 1  # order-free


def test_random_scheme_basic():
    ds = random_scheme(range(1, 11), [6], n_pairs=4, rng=np.random.default_rng(0))
    labels = sorted(p.label for p in ds.pairs)
    assert labels == [0, 0, 1, 1]
    for p in ds.pairs:
        assert p.label == brute_force_label(p.t1, p.t2, [6])
        if p.label == 0:
            assert min(p.t1, p.t2) < 6 <= max(p.t1, p.t2)


def test_random_scheme_default_count_and_balance():
    ds = random_scheme(range(1, 31), [15], rng=np.random.default_rng(1))
    assert len(ds) == 300  # 10x the range length
    assert sum(p.label for p in ds.pairs) == 150
    keys = {(min(p.t1, p.t2), max(p.t1, p.t2), p.label) for p in ds.pairs}
    assert len(keys) == len(ds.pairs)  # sampled without replacement


def test_random_scheme_errors():
    with pytest.raises(ParameterError):
        random_scheme(range(1, 11), [], n_pairs=4, rng=np.random.default_rng(0))
    with pytest.raises(ParameterError):
        random_scheme(range(1, 11), [6], n_pairs=5, rng=np.random.default_rng(0))


def test_windowed_scheme_examples():
    ds = windowed_scheme(range(1, 4), [], L=1)
    assert [(p.t1, p.t2) for p in ds.pairs] == [(1, 2), (2, 3)]
    assert all(p.label == 1 for p in ds.pairs)
    # 57 in-range timestamps with full predecessor windows: 57 * 12 pairs
    ds = windowed_scheme(range(50, 107), [], L=12)
    assert len(ds) == 684


def test_windowed_scheme_against_brute_force():
    rng = np.random.default_rng(4)
    for _ in range(30):
        start = int(rng.integers(1, 20))
        length = int(rng.integers(2, 50))
        L = int(rng.integers(1, 15))
        cps = sorted(set(rng.integers(2, start + length + 5, size=3).tolist()))
        ts = range(start, start + length)
        ds = windowed_scheme(ts, cps, L)
        expected = {
            (t - i, t, brute_force_label(t - i, t, cps))
            for t in ts
            for i in range(1, L + 1)
            if t - i >= 1
        }
        assert {(p.t1, p.t2, p.label) for p in ds.pairs} == expected
        assert len(ds.pairs) == len(expected)


def test_windowed_scheme_truncated_start():
    # range starting at the sequence start loses the early predecessors:
    # count = L*(M-L) + L*(L-1)/2 for M >= L
    M, L = 20, 5
    ds = windowed_scheme(range(1, M + 1), [], L)
    assert len(ds) == L * (M - L) + L * (L - 1) // 2


def test_validation_interval():
    rng = np.random.default_rng(0)
    window = validation_interval(200, [100], size=60, rng=rng)
    assert len(window) == 60 and 100 in window
    clipped = validation_interval(50, [3], size=60, rng=rng)
    assert list(clipped) == list(range(1, 51))
    with pytest.raises(ParameterError):
        validation_interval(100, [], size=60, rng=rng)


def test_pairs_csv_round_trip(tmp_path):
    ds = PairDataset(
        (PairExample(1, 5, 1), PairExample(2, 9, 0)), source="toy", split="train"
    )
    path = tmp_path / "pairs.csv"
    write_pairs_csv(ds, path)
    back = read_pairs_csv(path)
    assert back.pairs == ds.pairs


def test_split_ranges_subsets():
    pairs = tuple(PairExample(i, i + 1, 1) for i in range(1, 11))
    ds = PairDataset(pairs, split_ranges={"train": range(0, 6), "val": range(6, 10)})
    assert len(ds.subset("train")) == 6
    assert ds.subset("val").pairs == pairs[6:]
    with pytest.raises(ParameterError):
        ds.subset("test")
