import logging

import numpy as np
import pytest

from netcpd.detection import (
    calibrate_threshold,
    detect_online,
    localize_single_offline,
    mmd_statistic,
    run_detection,
    similarity_statistic,
)
from netcpd.errors import ParameterError
from netcpd.evaluation import adjusted_f1
from netcpd.graph import DynamicNetwork, Graph


def table_network(T, n=2):
    """Network whose snapshots are distinguishable only by identity; scores
    come from a lookup table keyed by timestamps."""
    return DynamicNetwork(tuple(Graph(np.zeros((n, n))) for _ in range(T)))


def table_score_fn(net, table):
    index = {id(g): t for t, g in enumerate(net.snapshots, start=1)}

    def fn(g1, g2):
        return table[index[id(g1)], index[id(g2)]]

    return fn


def naive_statistic(table, T, L):
    return np.array(
        [np.mean([table[t, t - i] for i in range(1, L + 1)]) for t in range(L + 1, T + 1)]
    )


def naive_detect(z, L, theta, first_t):
    out = []
    for j in range(len(z)):
        prev = z[max(0, j - L) : j]
        if len(prev) >= 1 and all(v > theta for v in prev) and z[j] <= theta:
            out.append(first_t + j)
    return out


def test_similarity_statistic_constant():
    net = table_network(6)
    z = similarity_statistic(lambda a, b: 1.0, net, L=2)
    assert np.allclose(z, 1.0) and len(z) == 4


def test_similarity_statistic_mean_example():
    net = table_network(4)
    table = {}
    for t in range(1, 5):
        for u in range(1, 5):
            table[t, u] = 0.0
    table[4, 3], table[4, 2], table[4, 1] = 0.9, 0.7, 0.8
    z = similarity_statistic(table_score_fn(net, table), net, L=3)
    assert np.isclose(z[0], 0.8)


def test_similarity_statistic_brute_force_oracle():
    rng = np.random.default_rng(0)
    for _ in range(50):
        T = int(rng.integers(4, 15))
        L = int(rng.integers(1, T - 1))
        net = table_network(T)
        table = {(t, u): rng.random() for t in range(1, T + 1) for u in range(1, T + 1)}
        z = similarity_statistic(table_score_fn(net, table), net, L)
        assert np.allclose(z, naive_statistic(table, T, L), atol=1e-12)
    with pytest.raises(ParameterError):
        similarity_statistic(lambda a, b: 1.0, table_network(3), L=3)


def test_similarity_statistic_monotone_in_scores():
    rng = np.random.default_rng(5)
    T, L = 12, 3
    net = table_network(T)
    lo = {(t, u): rng.random() * 0.5 for t in range(1, T + 1) for u in range(1, T + 1)}
    hi = {k: v + 0.2 for k, v in lo.items()}
    z_lo = similarity_statistic(table_score_fn(net, lo), net, L)
    z_hi = similarity_statistic(table_score_fn(net, hi), net, L)
    assert np.all(z_hi >= z_lo)


def test_detect_online_examples():
    # first statistic timestamp is L+1 = 3; the 0.4 sits at t = 5
    assert detect_online([0.9, 0.8, 0.4], L=2, theta=0.5) == [5]
    assert detect_online([0.9, 0.8, 0.9, 0.95], L=2, theta=0.5) == []
    assert detect_online([0.4, 0.4, 0.4, 0.4], L=2, theta=0.5) == []


def test_detect_online_matches_naive_rule():
    rng = np.random.default_rng(1)
    for _ in range(200):
        T = int(rng.integers(3, 40))
        L = int(rng.integers(1, 8))
        z = np.round(rng.random(T), 2)
        theta = float(rng.random())
        got = detect_online(z, L, theta)
        assert got == naive_detect(z, L, theta, L + 1)


def test_detect_online_spacing():
    # declarations can never be closer than L+1 steps apart
    rng = np.random.default_rng(2)
    for _ in range(100):
        z = rng.random(60)
        L = int(rng.integers(1, 6))
        declared = detect_online(z, L, 0.5)
        assert all(b - a > L for a, b in zip(declared, declared[1:]))


def test_localize_single_offline():
    z = [0.9, 0.9, 0.2, 0.9]
    assert localize_single_offline(z, "argmin", first_t=1) == 3
    assert localize_single_offline(z, "max_increment", first_t=1) == 3
    assert localize_single_offline([0.5, 0.5, 0.5], "argmin", first_t=4) == 4
    with pytest.raises(ParameterError):
        localize_single_offline([1.0], "max_increment")
    with pytest.raises(ParameterError):
        localize_single_offline([1.0], "nearest")


def test_mmd_statistic_trivial_and_constant():
    net = table_network(12)
    z, first_t = mmd_statistic(lambda a, b: 0.0, net, L=2)
    assert np.allclose(z, 0.0) and first_t == 4
    c = 0.37
    z, _ = mmd_statistic(lambda a, b: c, net, L=3)
    assert np.allclose(z, np.sqrt(c * 4 / 3))


def test_mmd_statistic_brute_force_oracle():
    rng = np.random.default_rng(3)
    for _ in range(30):
        T = int(rng.integers(8, 16))
        L = int(rng.integers(1, (T - 2) // 2 + 1))
        net = table_network(T)
        table = {(t, u): rng.random() for t in range(0, T + 2) for u in range(0, T + 2)}
        z, first_t = mmd_statistic(table_score_fn(net, table), net, L)
        for j, t in enumerate(range(first_t, T - L + 1)):
            total = 0.0
            for i in range(1, L + 2):
                for k in range(1, L + 2):
                    total += (
                        table[t - i, t - k] + table[t - 1 + i, t - 1 + k] - table[t - i, t - 1 + k]
                    )
            assert np.isclose(z[j], np.sqrt(max(total / (L * (L + 1)), 0.0)), atol=1e-12)
    with pytest.raises(ParameterError):
        mmd_statistic(lambda a, b: 1.0, table_network(5), L=2)


def test_calibrate_threshold_separable():
    z = np.array([0.9, 0.95, 0.9, 0.92, 0.1, 0.12, 0.1])
    theta = calibrate_threshold(z, [5 + 4], L=3, T=20, first_t=4)
    declared = detect_online(z, 3, theta, first_t=4)
    assert adjusted_f1(declared, [9], 20).f1 == 1.0
    # smallest optimal threshold: the first midpoint already separates
    uniq = np.unique(z)
    mids = (uniq[:-1] + uniq[1:]) / 2
    winners = [
        m for m in mids
        if adjusted_f1(detect_online(z, 3, m, first_t=4), [9], 20).f1 == 1.0
    ]
    assert np.isclose(theta, min(winners))


def test_calibrate_threshold_degenerate(caplog):
    with caplog.at_level(logging.WARNING):
        theta = calibrate_threshold(np.full(6, 0.5), [4], L=2, T=10)
    assert theta == 0.5
    with pytest.raises(ParameterError):
        calibrate_threshold(np.array([]), [4], L=2, T=10)
    with pytest.raises(ParameterError):
        calibrate_threshold(np.array([0.3, 0.4]), [], L=2, T=10)


def test_calibrate_threshold_matches_sweep_oracle():
    rng = np.random.default_rng(6)
    for _ in range(40):
        T = int(rng.integers(10, 25))
        L = int(rng.integers(1, 4))
        z = np.round(rng.random(T - L), 2)
        cps = sorted(set(int(x) for x in rng.integers(2, T + 1, size=2)))
        theta = calibrate_threshold(z, cps, L, T)
        uniq = np.unique(z)
        if uniq.size == 1:
            continue
        mids = (uniq[:-1] + uniq[1:]) / 2
        scores = [
            adjusted_f1(detect_online(z, L, m), cps, T).f1 for m in mids
        ]
        best = max(scores)
        if best > 0:
            expected = mids[int(np.argmax(scores))]  # argmax takes the first max
            assert np.isclose(theta, expected)


def test_strided_statistics_map_to_original_timestamps():
    # even/odd-split statistics report one value per two timestamps
    z = [0.9, 0.8, 0.9, 0.2, 0.9]
    assert detect_online(z, L=2, theta=0.5, first_t=6, stride=2) == [12]
    assert localize_single_offline(z, "argmin", first_t=6, stride=2) == 12
    assert localize_single_offline(z, "max_increment", first_t=6, stride=2) == 12
    theta = calibrate_threshold(z, [12], L=2, T=20, first_t=6, stride=2)
    assert detect_online(z, 2, theta, first_t=6, stride=2) == [12]


def test_detection_trace_csv(tmp_path):
    trace = run_detection([0.9, 0.8, 0.4], L=2, theta=0.5)
    assert trace.declared == (5,)
    path = tmp_path / "trace.csv"
    trace.write_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "t,z,declared"
    assert lines[3].startswith("5,") and lines[3].endswith(",1")
