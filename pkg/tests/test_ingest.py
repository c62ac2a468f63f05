import numpy as np
import pytest

from netcpd.errors import ParameterError
from netcpd.graph import DynamicNetwork, read_network, write_network
from netcpd.ingest import (
    TimeSeriesPanel,
    quantile_truncate,
    read_attributes_long_csv,
    read_series_csv,
    standardize_attributes,
    threshold_binarize,
    windowed_correlations,
)


def test_windowed_correlations_perfect_and_anti():
    base = np.sin(np.linspace(0, 20, 200))
    panel = TimeSeriesPanel(np.vstack([base, base, -base]))
    mats = windowed_correlations(panel, 50)
    assert len(mats) == 4
    for c in mats:
        assert np.allclose(np.diag(c), 1.0)
        assert np.isclose(c[0, 1], 1.0)
        assert np.isclose(c[0, 2], -1.0)
        assert np.max(np.abs(c - c.T)) == 0.0


def test_windowed_correlations_null_mean():
    rng = np.random.default_rng(8)
    panel = TimeSeriesPanel(rng.standard_normal((2, 5000)))
    mats = windowed_correlations(panel, 100)
    assert len(mats) == 50
    offdiag = [c[0, 1] for c in mats]
    # null correlation sd is about 1/sqrt(window)
    assert abs(np.mean(offdiag)) <= 3 * (1 / np.sqrt(100)) / np.sqrt(50)


def test_windowed_correlations_zero_variance():
    panel = TimeSeriesPanel(np.vstack([np.ones(100), np.linspace(0, 1, 100)]))
    (c,) = windowed_correlations(panel, 100)
    assert c[0, 1] == 0.0 and c[0, 0] == 1.0
    with pytest.raises(ParameterError):
        windowed_correlations(panel, 1)


def test_quantile_truncate_trivial():
    rng = np.random.default_rng(0)
    m = rng.uniform(-1, 1, size=(4, 4))
    m = (m + m.T) / 2
    assert not any(g.adjacency.any() for g in quantile_truncate([m], 0.0, 1.0))
    const = np.full((3, 3), 0.4)
    assert not any(g.adjacency.any() for g in quantile_truncate([const], 0.1, 0.9))


def test_quantile_truncate_order_statistics():
    # pooled entries {-0.9, -0.1, 0, 0.1, 0.9}; the 0.2/0.8 interpolated
    # quantiles are -0.26 and 0.26, so only the extremes become edges
    mats = [np.array([[v]]) for v in (-0.9, -0.1, 0.0, 0.1, 0.9)]
    graphs = quantile_truncate(mats, 0.2, 0.8)
    assert [g.adjacency[0, 0] for g in graphs] == [1.0, 0.0, 0.0, 0.0, 1.0]
    with pytest.raises(ParameterError):
        quantile_truncate([], 0.1, 0.9)


def test_quantile_truncate_density():
    rng = np.random.default_rng(3)
    mats = []
    for _ in range(10):
        m = rng.standard_normal((20, 20))
        mats.append((m + m.T) / 2)
    graphs = quantile_truncate(mats, 0.1, 0.9)
    density = np.mean([g.adjacency.mean() for g in graphs])
    assert abs(density - 0.2) <= 0.02


def test_threshold_binarize():
    dense = np.array([[1.0, 0.5, -0.4], [0.5, 1.0, 0.9], [-0.4, 0.9, 1.0]])
    (g,) = threshold_binarize([dense], 0.0)
    assert np.array_equal(g.adjacency, np.ones((3, 3)) - np.eye(3))
    (empty,) = threshold_binarize([dense], 1.0)
    assert not empty.adjacency.any()
    (ex,) = threshold_binarize([np.array([[1.0, 0.3], [0.3, 1.0]])], 0.2)
    assert ex.adjacency[0, 1] == 1.0 and ex.adjacency[0, 0] == 0.0


def test_standardize_attributes():
    const = [np.full((2, 1), 7.0), np.full((2, 1), 7.0)]
    out = standardize_attributes(const)
    assert all(np.allclose(a, 0.0) for a in out)
    rng = np.random.default_rng(1)
    raw = rng.standard_normal((50, 2))
    raw = (raw - raw.mean(axis=0)) / raw.std(axis=0)
    already = [raw[:25], raw[25:]]
    out = standardize_attributes(already)
    assert np.max(np.abs(np.concatenate(out) - raw)) <= 1e-10
    two = standardize_attributes([np.array([[1.0]]), np.array([[3.0]])])
    assert np.isclose(two[0][0, 0], -1.0) and np.isclose(two[1][0, 0], 1.0)
    pooled = np.concatenate(standardize_attributes([rng.uniform(2, 9, (5, 3)) for _ in range(4)]))
    assert np.max(np.abs(pooled.mean(axis=0))) <= 1e-10
    assert np.max(np.abs(pooled.std(axis=0) - 1.0)) <= 1e-10


def test_ingest_outputs_round_trip(tmp_path):
    rng = np.random.default_rng(5)
    panel = TimeSeriesPanel(rng.standard_normal((15, 300)))
    graphs = quantile_truncate(windowed_correlations(panel, 100), 0.1, 0.9)
    # unit diagonals sit above the 0.9 quantile here, so self-loops survive
    assert any(np.diag(g.adjacency).any() for g in graphs)
    net = DynamicNetwork(tuple(graphs))
    path = tmp_path / "net.jsonl"
    write_network(net, path)
    back = read_network(path)
    for g1, g2 in zip(net.snapshots, back.snapshots):
        assert np.array_equal(g1.adjacency, g2.adjacency)


def test_csv_readers(tmp_path):
    series = tmp_path / "panel.csv"
    series.write_text("1.0,2.0,3.0\n4.0,5.0,6.0\n")
    panel = read_series_csv(series)
    assert panel.n == 2 and panel.m == 3
    attrs = tmp_path / "attrs.csv"
    attrs.write_text("t,node,a,b\n1,0,1.0,2.0\n1,1,3.0,4.0\n2,0,5.0,6.0\n2,1,7.0,8.0\n")
    mats = read_attributes_long_csv(attrs, T=2, n=2)
    assert np.allclose(mats[1], [[5.0, 6.0], [7.0, 8.0]])
    sparse = tmp_path / "missing.csv"
    sparse.write_text("t,node,a\n1,0,1.0\n")
    with pytest.raises(ParameterError):
        read_attributes_long_csv(sparse, T=1, n=2)
