"""Per-node score vectors, ranking, and their TSV export."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import DataError
from .graph import Graph

METHODS = ("QA", "DK", "RWR", "DIA", "NBR")


@dataclass(frozen=True, eq=False)
class ScoreVector:
    method: str
    scores: np.ndarray
    params: dict = field(default_factory=dict)
    seeds: tuple[int, ...] = ()

    def __post_init__(self):
        if self.method not in METHODS:
            raise DataError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if not np.all(np.isfinite(self.scores)):
            raise DataError(f"{self.method} produced non-finite scores")


def rank_nodes(scores: np.ndarray, label_rank: np.ndarray,
               exclude: Iterable[int] = ()) -> np.ndarray:
    """Node indices by descending score, ties broken by ascending label."""
    keep = np.ones(len(scores), dtype=bool)
    keep[list(exclude)] = False
    cand = np.flatnonzero(keep)
    order = np.lexsort((label_rank[cand], -scores[cand]))
    return cand[order]


def write_scores(path, sv: ScoreVector, g: Graph) -> None:
    """Write a ``# {json}`` metadata line, then ``gene<TAB>score`` rows for non-seeds."""
    meta = {
        "method": sv.method,
        **sv.params,
        "graph_checksum": g.checksum(),
        "n_nodes": g.n_nodes,
        "seeds": [g.node_labels[i] for i in sv.seeds],
    }
    order = rank_nodes(sv.scores, g.label_rank(), exclude=sv.seeds)
    lines = ["# " + json.dumps(meta, sort_keys=True), "gene\tscore"]
    values = sv.scores.tolist()
    lines.extend(f"{g.node_labels[i]}\t{values[i]!r}" for i in order)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_scores(path) -> tuple[dict, list[tuple[str, float]]]:
    """Inverse of :func:`write_scores`: (metadata, [(gene, score), ...])."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or not lines[0].startswith("# "):
        raise DataError(f"{path}: missing metadata header")
    meta = json.loads(lines[0][2:])
    rows = []
    for line in lines[2:]:
        gene, score = line.split("\t")
        rows.append((gene, float(score)))
    return meta, rows
