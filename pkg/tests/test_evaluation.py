import filecmp
import math

import numpy as np
import pytest

from conftest import make_graph
from qwprio.errors import DataError
from qwprio.evaluation import (MethodConfig, RankedList, Split, default_methods, make_splits,
                               mean_reciprocal_rank, recall_at, recall_curve, run_benchmark)
from qwprio.ingest import SeedSet


def seedset(n, disease="D"):
    return SeedSet(disease, tuple(range(n)))


def ranked(labels):
    labels = np.asarray(labels, dtype=bool)
    return RankedList(np.arange(len(labels)), labels)


# --- splits ------------------------------------------------------------------

@pytest.mark.parametrize("size, held", [(20, 10), (15, 7), (2, 1)])
def test_split_sizes_and_partition(size, held):
    for split in make_splits(seedset(size), trials=10, rng_seed=1):
        assert len(split.held_out) == held
        assert set(split.train_seeds) | set(split.held_out) == set(range(size))
        assert not set(split.train_seeds) & set(split.held_out)


def test_splits_deterministic_and_varied():
    a = make_splits(seedset(20), 10, rng_seed=5)
    assert a == make_splits(seedset(20), 10, rng_seed=5)
    assert a != make_splits(seedset(20), 10, rng_seed=6)
    assert len({s.held_out for s in a}) > 1


def test_splits_need_two_seeds():
    with pytest.raises(DataError):
        make_splits(seedset(1))


# --- recall ------------------------------------------------------------------

def test_recall_examples():
    r = ranked([1, 0, 0, 0, 0, 0, 1])
    assert recall_at(r, 5) == 0.5
    assert recall_at(r, 7) == 1.0
    assert recall_at(ranked([0, 0, 1]), 2) == 0.0
    with pytest.raises(DataError):
        recall_at(ranked([0, 0]), 1)
    with pytest.raises(DataError):
        recall_at(r, 8)


def test_recall_curve_monotone_and_padded():
    rng = np.random.default_rng(0)
    for _ in range(20):
        labels = rng.random(30) < 0.2
        labels[0] = True
        curve = recall_curve(ranked(labels), 40)
        assert np.all(np.diff(curve) >= 0) and curve[-1] == 1.0
        assert curve[29] == recall_at(ranked(labels), 30)


def test_ranked_list_excludes_train_and_breaks_ties_by_label():
    split = Split("D", (0,), (2, 3), 0, 0)
    label_rank = np.array([0, 3, 1, 2])
    r = RankedList.from_scores(np.array([9.0, 1.0, 1.0, 5.0]), label_rank, split)
    assert r.order.tolist() == [3, 2, 1]
    assert r.labels.tolist() == [True, True, False]


# --- mean reciprocal rank ------------------------------------------------------

def test_mrr_distinct():
    mrr = mean_reciprocal_rank({"a": [0.9], "b": [0.5], "c": [0.1]})
    assert mrr == pytest.approx({"a": 1.0, "b": 0.5, "c": 1 / 3})


def test_mrr_tie_for_best():
    mrr = mean_reciprocal_rank({"a": [0.4], "b": [0.4]})
    assert mrr == pytest.approx({"a": 1 / 1.5, "b": 1 / 1.5})


def test_mrr_hand_table():
    recalls = {"QA": [0.50, 0.20], "DK": [0.40, 0.30], "RWR": [0.40, 0.10],
               "DIA": [0.10, 0.30], "NBR": [0.05, 0.00]}
    # disease 1 ranks: QA 1, DK 2.5, RWR 2.5, DIA 4, NBR 5
    # disease 2 ranks: DK 1.5, DIA 1.5, QA 3, RWR 4, NBR 5
    expected = {"QA": (1 + 1 / 3) / 2, "DK": (1 / 2.5 + 1 / 1.5) / 2,
                "RWR": (1 / 2.5 + 1 / 4) / 2, "DIA": (1 / 4 + 1 / 1.5) / 2, "NBR": 1 / 5}
    assert mean_reciprocal_rank(recalls) == pytest.approx(expected, abs=1e-15)


def test_mrr_sums_to_harmonic_number():
    rng = np.random.default_rng(4)
    for m in range(1, 7):
        table = np.array([rng.permutation(m) for _ in range(10)]).T
        recalls = {f"m{i}": table[i].tolist() for i in range(m)}
        total = sum(mean_reciprocal_rank(recalls).values())
        assert total == pytest.approx(sum(1 / k for k in range(1, m + 1)), abs=1e-12)


def test_mrr_single_method():
    assert mean_reciprocal_rank({"only": [0.1, 0.7]}) == {"only": 1.0}


# --- end to end ------------------------------------------------------------------

def test_method_config_validation():
    with pytest.raises(DataError):
        MethodConfig("XYZ")
    assert [m.name for m in default_methods()] == ["QA", "DK", "RWR", "DIA", "NBR"]


def test_nbr_beats_random_on_planted_module(toy_module_graph):
    g, mod = toy_module_graph
    seeds = SeedSet.from_labels("toy", mod, g)
    label_rank = g.label_rank()
    rng = np.random.default_rng(2024)
    report = run_benchmark(g, [seeds], [MethodConfig("NBR")], trials=10, n_max=5, rng_seed=42)
    nbr = report.results[0].curves["NBR"][:, 4]
    wins = 0
    for split, nbr_recall in zip(make_splits(seeds, 10, 42), nbr):
        rand = RankedList.from_scores(rng.random(g.n_nodes), label_rank, split)
        wins += nbr_recall > recall_at(rand, 5)
    assert wins >= 9


def test_benchmark_toy_all_methods(toy_module_graph):
    g, mod = toy_module_graph
    seeds = SeedSet.from_labels("toy", mod, g)
    report = run_benchmark(g, [seeds], trials=4, n_max=10, rng_seed=3)
    assert report.leak_count == 0 and not report.failures
    for m in report.methods:
        curve = report.results[0].curves[m]
        assert curve.shape == (4, 10)
        assert np.all(np.diff(curve, axis=1) >= 0) and np.all(curve <= 1)
    assert all(0 < v <= 1 for v in report.mrr_at(10).values())


def test_failures_are_isolated(toy_module_graph):
    g, mod = toy_module_graph
    good = SeedSet.from_labels("good", mod, g)
    bad = SeedSet("bad", (0,))
    report = run_benchmark(g, [bad, good], [MethodConfig("NBR"), MethodConfig("RWR")],
                           trials=2, n_max=5, rng_seed=0)
    assert list(report.failures) == ["bad"]
    assert [r.disease_id for r in report.succeeded] == ["good"]
    assert set(report.mrr_at(5)) == {"NBR", "RWR"}


def test_report_write_is_byte_identical(tmp_path, toy_module_graph):
    g, mod = toy_module_graph
    sets = [SeedSet.from_labels("toy", mod, g),
            SeedSet.from_labels("ring", [f"B{i}" for i in range(6)], g)]
    methods = [MethodConfig("NBR"), MethodConfig("RWR"), MethodConfig("DK")]
    for name in ("a", "b"):
        run_benchmark(g, sets, methods, trials=3, n_max=12, rng_seed=8).write(
            tmp_path / name, "toyset", "toynet")
    for f in ("cells.tsv", "curves.tsv", "mrr.json"):
        assert filecmp.cmp(tmp_path / "a" / f, tmp_path / "b" / f, shallow=False)
    import json
    payload = json.loads((tmp_path / "a" / "mrr.json").read_text())
    assert payload["tie_convention"] == "average"
    assert "25" not in payload["mrr"]
    run_benchmark(g, sets, methods, trials=3, n_max=30, rng_seed=8).write(tmp_path / "c",
                                                                         "toyset", "toynet")
    payload = json.loads((tmp_path / "c" / "mrr.json").read_text())
    assert set(payload["mrr"]["25"]["toyset"]["toynet"]) == {"NBR", "RWR", "DK"}
    assert not math.isnan(payload["recall"]["25"]["toyset"]["toynet"]["NBR"])


def test_benchmark_rejects_bad_args(toy_module_graph):
    g, mod = toy_module_graph
    with pytest.raises(DataError):
        run_benchmark(g, [], trials=0)


def test_single_disease_two_methods_tie(toy_module_graph):
    g, mod = toy_module_graph
    seeds = SeedSet.from_labels("toy", mod, g)
    report = run_benchmark(g, [seeds], [MethodConfig("RWR"), MethodConfig("NBR")],
                           trials=10, n_max=5, rng_seed=42)
    # both recover every held-out module member, so they share ranks 1 and 2
    assert report.mean_recalls(5) == {"RWR": [1.0], "NBR": [1.0]}
    assert report.mrr_at(5) == pytest.approx({"RWR": 1 / 1.5, "NBR": 1 / 1.5})
