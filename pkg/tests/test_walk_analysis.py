import math

import networkx as nx
import numpy as np
import pytest

from conftest import dense_propagator, graph_from_nx, make_graph
from qwprio.graph import Graph, bfs_distances
from qwprio.ingest import SeedSet
from qwprio.qwalk import build_hamiltonian
from qwprio.walk_analysis import (DEFAULT_ALPHAS, DEFAULT_DEGREE_RANGES, default_times,
                                  degree_stratified_mdt, disease_mdt, enrichment_pvalue,
                                  mean_distance_travelled, write_curves)


def dense_mdt(g, source, seeds, alpha, t):
    """Oracle: MDT from a full eigendecomposition of the Hamiltonian."""
    prop = dense_propagator(build_hamiltonian(g, seeds, alpha).matrix.toarray(), t)
    dist = bfs_distances(g, source).astype(float)
    probs = np.abs(prop[:, source]) ** 2
    reach = dist >= 0
    return float((dist[reach] * probs[reach]).sum())


@pytest.fixture
def toy10():
    G = nx.connected_watts_strogatz_graph(10, 4, 0.3, seed=11)
    return graph_from_nx(G)


def test_default_times():
    t = default_times()
    assert len(t) == 50 and t[0] == 0.0 and t[-1] == 1.0


def test_mdt_zero_time(triangle):
    curve = mean_distance_travelled(triangle, 0, [0], 5.0, [0.0, 0.5])
    assert curve.values[0] == 0.0


def test_mdt_two_node_closed_form(path2):
    times = np.linspace(0, 3, 50)
    curve = mean_distance_travelled(path2, 0, [0], 0.0, times)
    np.testing.assert_allclose(curve.values, np.sin(times) ** 2, atol=1e-10)
    assert curve.context["mode"] == "single"


def test_alpha_suppresses_two_node_transfer(path2):
    a0 = mean_distance_travelled(path2, 0, [0], 0.0, [1.0]).values[0]
    a5 = mean_distance_travelled(path2, 0, [0], 5.0, [1.0]).values[0]
    # transfer with a detuned source is sin^2(wt) / (1 + alpha^2/4), w = sqrt(1 + alpha^2/4)
    w = math.sqrt(1 + 25 / 4)
    assert a5 == pytest.approx(math.sin(w) ** 2 / (1 + 25 / 4), abs=1e-10)
    assert a5 < a0


def test_mdt_matches_dense_oracle(toy10):
    times = [0.0, 0.3, 1.0, 2.5]
    for alpha in (0.0, 5.0, 20.0):
        curve = mean_distance_travelled(toy10, 3, [3, 7], alpha, times)
        expected = [dense_mdt(toy10, 3, [3, 7], alpha, t) for t in times]
        np.testing.assert_allclose(curve.values, expected, atol=1e-9)
        assert curve.context["mode"] == "seed-set"


def test_mdt_bounded_by_eccentricity(toy10):
    ecc = bfs_distances(toy10, 0).max()
    curve = mean_distance_travelled(toy10, 0, [0], 0.0, np.linspace(0, 10, 40))
    assert np.all(curve.values >= 0) and np.all(curve.values <= ecc + 1e-12)


def test_unreachable_mass_reported():
    g = make_graph([("a", "b"), ("c", "d")])
    curve = mean_distance_travelled(g, 0, [0], 0.0, [0.7])
    assert curve.unreachable_mass[0] == pytest.approx(0.0, abs=1e-14)
    # the walk cannot leave its component, also with seeds in both components
    curve = disease_mdt(g, SeedSet("D", (0, 2)), 0.0, [0.7])
    assert curve.unreachable_mass[0] == pytest.approx(0.0, abs=1e-14)
    assert curve.values[0] == pytest.approx(math.sin(0.7) ** 2, abs=1e-10)


def test_disease_mdt_singleton_equals_single_source(toy10):
    times = np.linspace(0, 1, 7)
    single = mean_distance_travelled(toy10, 4, [4], 5.0, times)
    disease = disease_mdt(toy10, SeedSet("D", (4,)), 5.0, times)
    assert disease.values.tolist() == single.values.tolist()
    assert disease.context["disease_id"] == "D"


def test_disease_mdt_alpha_keeps_walk_local(toy10):
    seeds = SeedSet("D", (1, 5, 8))
    low = disease_mdt(toy10, seeds, 0.0, [0.0, 1.0])
    high = disease_mdt(toy10, seeds, 5.0, [0.0, 1.0])
    assert low.values[0] == high.values[0] == 0.0
    oracle = [np.mean([dense_mdt(toy10, s, seeds.seed_indices, a, 1.0) for s in (1, 5, 8)])
              for a in (0.0, 5.0)]
    assert high.values[1] == pytest.approx(oracle[1], abs=1e-9)
    assert low.values[1] == pytest.approx(oracle[0], abs=1e-9)
    assert high.values[1] <= low.values[1]
    with pytest.raises(ValueError):
        disease_mdt(toy10, [], 0.0)


def test_stratified_grid_and_determinism():
    g = graph_from_nx(nx.barabasi_albert_graph(120, 2, seed=1))
    ranges = ((1, 3), (4, 8), (9, 40))
    times = np.linspace(0, 1, 5)
    a = degree_stratified_mdt(g, ranges, DEFAULT_ALPHAS, times, samples=4, rng_seed=3)
    b = degree_stratified_mdt(g, ranges, DEFAULT_ALPHAS, times, samples=4, rng_seed=3)
    assert len(a) == 12
    for key in a:
        assert a[key].values.tolist() == b[key].values.tolist()
        assert a[key].values[0] == 0.0
    # sources are shared across alphas within a range
    assert a[((1, 3), 0.0)].context["sources"] == a[((1, 3), 100.0)].context["sources"]


def test_stratified_single_node_range_and_skips(caplog):
    g = make_graph([("hub", f"l{i}") for i in range(5)])
    times = [0.0, 0.4]
    out = degree_stratified_mdt(g, ((5, 5), (50, 60)), (0.0,), times, samples=3)
    assert list(out) == [((5, 5), 0.0)]
    single = mean_distance_travelled(g, g.index_of("hub"), [g.index_of("hub")], 0.0, times)
    np.testing.assert_allclose(out[((5, 5), 0.0)].values, single.values, atol=1e-15)
    assert "range skipped" in caplog.text


def test_write_curves(tmp_path, path2):
    curve = mean_distance_travelled(path2, 0, [0], 0.0, [0.0, 1.0])
    path = tmp_path / "c.tsv"
    write_curves(path, [curve])
    lines = path.read_text().splitlines()
    assert lines[0].split("\t") == ["curve", "t", "mdt", "unreachable_mass", "context"]
    assert len(lines) == 3 and "alpha=0.0" in lines[1]


def test_enrichment_examples():
    assert enrichment_pvalue(10, 2, 3, 0) == 1.0
    assert enrichment_pvalue(10, 2, 3, 1) == pytest.approx(8 / 15, abs=1e-12)
    assert enrichment_pvalue(20, 5, 4, 4) == pytest.approx(5 / 4845, rel=1e-12)
    ps = [enrichment_pvalue(40, 12, 9, o) for o in range(10)]
    assert all(a >= b for a, b in zip(ps, ps[1:])) and all(0 < p <= 1 for p in ps)
