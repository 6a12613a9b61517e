"""Repeated 50% seed hold-out, recall@N curves and mean reciprocal ranks."""
from __future__ import annotations

import json
import logging
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
from scipy.stats import rankdata

from . import baselines, qwalk
from .errors import DataError, QwprioError
from .graph import Graph
from .ingest import SeedSet
from .scores import METHODS, rank_nodes

log = logging.getLogger(__name__)

MRR_THRESHOLDS = (25, 300)
TIE_CONVENTION = "average"


@dataclass(frozen=True)
class Split:
    disease_id: str
    train_seeds: tuple[int, ...]
    held_out: tuple[int, ...]
    trial: int
    rng_seed: int


@dataclass(frozen=True)
class RankedList:
    order: np.ndarray
    labels: np.ndarray

    @classmethod
    def from_scores(cls, scores, label_rank, split: Split) -> "RankedList":
        order = rank_nodes(scores, label_rank, exclude=split.train_seeds)
        held = np.zeros(len(scores), dtype=bool)
        held[list(split.held_out)] = True
        return cls(order, held[order])

    def __len__(self):
        return len(self.order)


@dataclass(frozen=True)
class MethodConfig:
    name: str
    params: Mapping = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in METHODS:
            raise DataError(f"unknown method {self.name!r}; valid methods: {', '.join(METHODS)}")


def default_methods() -> list[MethodConfig]:
    return [
        MethodConfig("QA", {"t": qwalk.DEFAULT_T, "alpha": qwalk.DEFAULT_ALPHA}),
        MethodConfig("DK", {"t": baselines.DK_T}),
        MethodConfig("RWR", {"restart": baselines.RWR_RESTART}),
        MethodConfig("DIA", {"alpha_w": baselines.DIAMOND_WEIGHT}),
        MethodConfig("NBR", {}),
    ]


def _stream(rng_seed: int, disease_id: str) -> np.random.SeedSequence:
    return np.random.SeedSequence([int(rng_seed), zlib.crc32(disease_id.encode("utf-8"))])


def make_splits(seeds: SeedSet, trials: int = 10, rng_seed: int = 0) -> list[Split]:
    """Hold out floor(|S|/2) seeds per trial, reproducibly from ``rng_seed``."""
    members = np.array(seeds.seed_indices, dtype=np.int64)
    if len(members) < 2:
        raise DataError(f"{seeds.disease_id}: need at least 2 seeds to split, have {len(members)}")
    rng = np.random.default_rng(_stream(rng_seed, seeds.disease_id))
    n_out = len(members) // 2
    splits = []
    for trial in range(trials):
        perm = rng.permutation(members)
        splits.append(Split(seeds.disease_id, tuple(sorted(perm[n_out:].tolist())),
                            tuple(sorted(perm[:n_out].tolist())), trial, rng_seed))
    return splits


def recall_at(ranked: RankedList, n_threshold: int) -> float:
    """Share of held-out genes found among the top ``n_threshold``."""
    total = int(ranked.labels.sum())
    if total == 0:
        raise DataError("recall is undefined without held-out genes")
    if not 1 <= n_threshold <= len(ranked):
        raise DataError(f"threshold {n_threshold} outside 1..{len(ranked)}")
    return int(ranked.labels[:n_threshold].sum()) / total


def recall_curve(ranked: RankedList, n_max: int) -> np.ndarray:
    """recall@N for N = 1..n_max; past the list end recall stays at its final value."""
    total = int(ranked.labels.sum())
    if total == 0:
        raise DataError("recall is undefined without held-out genes")
    hits = np.cumsum(ranked.labels[:n_max]) / total
    if len(hits) < n_max:
        last = hits[-1] if len(hits) else 0.0
        hits = np.concatenate([hits, np.full(n_max - len(hits), last)])
    return hits


def mean_reciprocal_rank(avg_recalls: Mapping[str, Sequence[float]]) -> dict[str, float]:
    """MRR per method from ``{method: [average recall per disease]}``.

    Per disease, methods are ranked by recall (1 = best), tied methods sharing
    the mean of their positions.
    """
    methods = list(avg_recalls)
    if len(methods) < 1:
        raise DataError("no methods to rank")
    table = np.array([np.asarray(avg_recalls[m], dtype=np.float64) for m in methods])
    if table.ndim != 2 or table.shape[1] < 1:
        raise DataError("need at least one disease per method")
    ranks = np.apply_along_axis(lambda col: rankdata(-col, method=TIE_CONVENTION), 0, table)
    recip = (1.0 / ranks).mean(axis=1)
    return {m: float(v) for m, v in zip(methods, recip)}


def score_method(g: Graph, method: MethodConfig, train: Sequence[int], n_max: int,
                 tolerance: float = qwalk.DEFAULT_TOL) -> np.ndarray:
    p = dict(method.params)
    if method.name == "QA":
        params = qwalk.WalkParams(p.get("t", qwalk.DEFAULT_T),
                                  p.get("alpha", qwalk.DEFAULT_ALPHA),
                                  p.get("tolerance", tolerance))
        return qwalk.score_qa(g, train, params).scores
    if method.name == "DK":
        return baselines.score_dk(g, train, p.get("t", baselines.DK_T),
                                  p.get("tolerance", tolerance)).scores
    if method.name == "RWR":
        return baselines.score_rwr(g, train, p.get("restart", baselines.RWR_RESTART)).scores
    if method.name == "DIA":
        return baselines.score_diamond(g, train, int(p.get("n_rank", n_max)),
                                       int(p.get("alpha_w", baselines.DIAMOND_WEIGHT))).scores
    return baselines.score_nbr(g, train).scores


@dataclass
class DiseaseResult:
    disease_id: str
    curves: dict[str, np.ndarray]       # method -> (trials, n_max)
    leaks: int = 0
    error: str | None = None


@dataclass
class EvalReport:
    methods: list[str]
    n_max: int
    trials: int
    rng_seed: int
    results: list[DiseaseResult]

    @property
    def succeeded(self) -> list[DiseaseResult]:
        return [r for r in self.results if r.error is None]

    @property
    def failures(self) -> dict[str, str]:
        return {r.disease_id: r.error for r in self.results if r.error is not None}

    @property
    def leak_count(self) -> int:
        return sum(r.leaks for r in self.results)

    def mean_recalls(self, n: int) -> dict[str, list[float]]:
        """Per method, the trial-averaged recall@n of each successful disease."""
        return {m: [float(r.curves[m][:, n - 1].mean()) for r in self.succeeded]
                for m in self.methods}

    def mrr_at(self, n: int) -> dict[str, float]:
        if not self.succeeded:
            return {}
        return mean_reciprocal_rank(self.mean_recalls(n))

    def mrr_curve(self) -> dict[str, np.ndarray]:
        curves = {m: np.zeros(self.n_max) for m in self.methods}
        if not self.succeeded:
            return curves
        for n in range(1, self.n_max + 1):
            for m, v in self.mrr_at(n).items():
                curves[m][n - 1] = v
        return curves

    def mean_curve(self, method: str) -> np.ndarray:
        rows = [r.curves[method] for r in self.succeeded]
        if not rows:
            return np.zeros(self.n_max)
        return np.concatenate(rows).mean(axis=0)

    def write(self, out_dir, disease_set: str = "diseases", network: str = "network") -> dict:
        """Write cells.tsv, curves.tsv and mrr.json; return the MRR payload."""
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        cells = ["disease_id\tmethod\ttrial\tN\trecall"]
        for r in self.succeeded:
            for m in self.methods:
                for trial, row in enumerate(r.curves[m]):
                    cells.extend(f"{r.disease_id}\t{m}\t{trial}\t{n}\t{v!r}"
                                 for n, v in enumerate(row.tolist(), start=1))
        (out / "cells.tsv").write_text("\n".join(cells) + "\n", encoding="utf-8")

        mrr_curves = self.mrr_curve()
        agg = ["N\tmethod\tmean_recall\tmrr"]
        for m in self.methods:
            mean, mrr = self.mean_curve(m).tolist(), mrr_curves[m].tolist()
            agg.extend(f"{n}\t{m}\t{mean[n - 1]!r}\t{mrr[n - 1]!r}"
                       for n in range(1, self.n_max + 1))
        (out / "curves.tsv").write_text("\n".join(agg) + "\n", encoding="utf-8")

        payload = {
            "tie_convention": TIE_CONVENTION,
            "trials": self.trials,
            "n_max": self.n_max,
            "rng_seed": self.rng_seed,
            "n_diseases": len(self.succeeded),
            "mrr": {},
            "recall": {},
            "failures": self.failures,
            "leaks": self.leak_count,
        }
        for n in MRR_THRESHOLDS:
            if n > self.n_max:
                continue
            payload["mrr"][str(n)] = {disease_set: {network: self.mrr_at(n)}}
            means = self.mean_recalls(n)
            payload["recall"][str(n)] = {disease_set: {network: {
                m: (float(np.mean(v)) if v else None) for m, v in means.items()}}}
        (out / "mrr.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                                      encoding="utf-8")
        return payload


def evaluate_disease(g: Graph, seeds: SeedSet, methods: Sequence[MethodConfig],
                     trials: int, n_max: int, rng_seed: int,
                     tolerance: float = qwalk.DEFAULT_TOL) -> DiseaseResult:
    label_rank = g.label_rank()
    names = [m.name for m in methods]
    curves = {m: np.zeros((trials, n_max)) for m in names}
    leaks = 0
    try:
        for split in make_splits(seeds, trials, rng_seed):
            for method in methods:
                scores = score_method(g, method, split.train_seeds, n_max, tolerance)
                ranked = RankedList.from_scores(scores, label_rank, split)
                leaks += int(np.isin(ranked.order, split.train_seeds).sum())
                curves[method.name][split.trial] = recall_curve(ranked, n_max)
    except QwprioError as exc:
        log.warning("disease %s failed: %s", seeds.disease_id, exc)
        return DiseaseResult(seeds.disease_id, {}, leaks, f"{type(exc).__name__}: {exc}")
    return DiseaseResult(seeds.disease_id, curves, leaks)


def _evaluate_task(args):
    return evaluate_disease(*args)


def run_benchmark(g: Graph, diseases: Sequence[SeedSet],
                  methods: Sequence[MethodConfig] | None = None, trials: int = 10,
                  n_max: int = 300, rng_seed: int = 0, workers: int = 1,
                  tolerance: float = qwalk.DEFAULT_TOL) -> EvalReport:
    """Cross-validate every method on every disease.

    Diseases are independent; each draws its splits from a stream derived
    from ``rng_seed`` and its id, so results do not depend on ``workers``.
    """
    methods = list(methods or default_methods())
    if not methods:
        raise DataError("no methods selected")
    if trials < 1 or n_max < 1:
        raise DataError("trials and n_max must be >= 1")
    tasks = [(g, d, methods, trials, n_max, rng_seed, tolerance) for d in diseases]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_evaluate_task, tasks))
    else:
        results = [_evaluate_task(t) for t in tasks]
    return EvalReport([m.name for m in methods], n_max, trials, rng_seed, results)
