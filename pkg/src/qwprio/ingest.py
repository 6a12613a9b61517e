"""Disease-gene association files, per-source filters, and seed sets."""
from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .errors import DataError
from .graph import Graph

log = logging.getLogger(__name__)

SOURCES = ("OT", "DGN", "RAW")

DEFAULT_THRESHOLDS = {
    "OT": {"score": 0.6},
    "DGN": {"score": 0.3, "dsi": 0.5},
    "RAW": {},
}


@dataclass(frozen=True)
class AssociationRecord:
    disease_id: str
    gene: str
    score: float
    dsi: float | None = None

    def __post_init__(self):
        if not 0.0 <= self.score <= 1.0:
            raise DataError(f"score {self.score} outside [0, 1] for {self.disease_id}/{self.gene}")
        if self.dsi is not None and not 0.0 <= self.dsi <= 1.0:
            raise DataError(f"dsi {self.dsi} outside [0, 1] for {self.disease_id}/{self.gene}")


@dataclass(frozen=True)
class SeedSet:
    disease_id: str
    seed_indices: tuple[int, ...]
    unmapped: tuple[str, ...] = ()

    def __post_init__(self):
        idx = tuple(sorted(set(int(i) for i in self.seed_indices)))
        if len(idx) != len(self.seed_indices):
            raise DataError(f"duplicate seed indices in {self.disease_id}")
        object.__setattr__(self, "seed_indices", idx)

    def __len__(self):
        return len(self.seed_indices)

    def to_dict(self, g: Graph) -> dict:
        return {
            "disease_id": self.disease_id,
            "seeds": [g.node_labels[i] for i in self.seed_indices],
            "unmapped": list(self.unmapped),
        }

    @classmethod
    def from_labels(cls, disease_id: str, labels: Iterable[str], g: Graph) -> "SeedSet":
        mapped, unmapped = set(), []
        for label in labels:
            if label in g.node_index:
                mapped.add(g.node_index[label])
            elif label not in unmapped:
                unmapped.append(label)
        return cls(disease_id, tuple(sorted(mapped)), tuple(sorted(unmapped)))


def _parse_unit(value: str, what: str, path, lineno: int) -> float | None:
    value = value.strip()
    if value == "" or value.upper() in ("NA", "NAN", "NONE"):
        return None
    try:
        return float(value)
    except ValueError:
        raise DataError(f"{path}:{lineno}: bad {what} value {value!r}") from None


def read_associations(path) -> list[AssociationRecord]:
    """Parse a TSV with header columns disease_id, gene, score and optional dsi."""
    path = Path(path)
    try:
        handle = path.open(encoding="utf-8", newline="")
    except OSError as exc:
        raise DataError(f"cannot read associations {path}: {exc.strerror or exc}") from exc
    records = []
    with handle:
        reader = csv.DictReader(handle, delimiter="\t")
        missing = {"disease_id", "gene", "score"} - set(reader.fieldnames or ())
        if missing:
            raise DataError(f"{path}: missing header columns {sorted(missing)}")
        has_dsi = "dsi" in reader.fieldnames
        for lineno, row in enumerate(reader, start=2):
            score = _parse_unit(row["score"] or "", "score", path, lineno)
            if score is None:
                raise DataError(f"{path}:{lineno}: missing score")
            dsi = _parse_unit(row["dsi"] or "", "dsi", path, lineno) if has_dsi else None
            try:
                records.append(AssociationRecord(row["disease_id"].strip(),
                                                 row["gene"].strip(), score, dsi))
            except DataError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from None
    return records


def collapse_duplicates(records: Iterable[AssociationRecord]) -> list[AssociationRecord]:
    """Keep one record per (disease, gene): the one with the highest score."""
    best: dict[tuple[str, str], AssociationRecord] = {}
    for rec in records:
        key = (rec.disease_id, rec.gene)
        if key not in best or rec.score > best[key].score:
            best[key] = rec
    return list(best.values())


def filter_associations(records: Sequence[AssociationRecord], source: str,
                        thresholds: dict | None = None) -> list[AssociationRecord]:
    """Apply the source's score (and, for DGN, specificity) thresholds.

    OT keeps score >= 0.6, DGN keeps score >= 0.3 with dsi >= 0.5, RAW keeps
    everything. ``thresholds`` overrides the defaults key by key. DGN
    records without a dsi are dropped and counted in a warning.
    """
    source = source.upper()
    if source not in SOURCES:
        raise DataError(f"unknown association source {source!r}; expected one of {SOURCES}")
    limits = dict(DEFAULT_THRESHOLDS[source])
    limits.update(thresholds or {})
    min_score = limits.get("score")
    min_dsi = limits.get("dsi")
    kept, no_dsi = [], 0
    for rec in collapse_duplicates(records):
        if min_score is not None and rec.score < min_score:
            continue
        if min_dsi is not None:
            if rec.dsi is None:
                no_dsi += 1
                continue
            if rec.dsi < min_dsi:
                continue
        kept.append(rec)
    if no_dsi:
        log.warning("dropped %d %s records without a disease specificity index", no_dsi, source)
    return kept


def build_seed_sets(records: Iterable[AssociationRecord], g: Graph,
                    min_coverage: int = 15) -> list[SeedSet]:
    """Group by disease, map genes onto ``g``, keep diseases with enough mapped seeds."""
    genes: dict[str, list[str]] = {}
    for rec in records:
        genes.setdefault(rec.disease_id, []).append(rec.gene)
    out = []
    for disease_id in sorted(genes):
        seeds = SeedSet.from_labels(disease_id, genes[disease_id], g)
        if len(seeds) >= min_coverage and len(seeds) > 0:
            out.append(seeds)
        else:
            log.debug("disease %s: %d mapped seeds < %d", disease_id, len(seeds), min_coverage)
    return out


def write_seed_sets(path, seed_sets: Sequence[SeedSet], g: Graph) -> None:
    payload = [s.to_dict(g) for s in seed_sets]
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def read_seed_sets(path, g: Graph) -> list[SeedSet]:
    """Load seed sets from JSON, re-resolving labels against ``g``."""
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise DataError(f"cannot read seed sets {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON ({exc})") from exc
    if isinstance(payload, dict):
        payload = [payload]
    out = []
    for entry in payload:
        s = SeedSet.from_labels(entry["disease_id"], entry["seeds"], g)
        extra = tuple(sorted(set(s.unmapped) | set(entry.get("unmapped", ()))))
        out.append(SeedSet(s.disease_id, s.seed_indices, extra))
    return out
