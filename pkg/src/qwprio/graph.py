"""Undirected PPI networks: loading, degrees, BFS distances, summary statistics."""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from . import kernels
from .errors import DataError, GraphFormatError

UNREACHABLE = kernels.UNREACHABLE


@dataclass(frozen=True)
class LoadSummary:
    edges_read: int
    duplicate_edges: int
    self_edges: int
    n_nodes: int
    n_edges: int

    def to_json(self) -> str:
        return json.dumps(self.__dict__, sort_keys=True)


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected graph with string node labels.

    ``adjacency`` is a symmetric CSR matrix of float64 ones; a diagonal
    entry marks a self-interacting protein. ``n_edges`` counts each
    undirected edge, and each self-edge, once.
    """

    node_labels: tuple[str, ...]
    node_index: Mapping[str, int]
    adjacency: sp.csr_matrix
    n_edges: int
    n_self_edges: int
    summary: LoadSummary | None = field(default=None, compare=False)

    @property
    def n_nodes(self) -> int:
        return len(self.node_labels)

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[str, str]],
                   nodes: Iterable[str] = (), keep_self_edges: bool = True) -> "Graph":
        """Build a graph from label pairs; duplicates are dropped.

        ``nodes`` lists extra (possibly isolated) labels, placed first.
        Node indices follow first appearance.
        """
        index: dict[str, int] = {}
        for label in nodes:
            index.setdefault(label, len(index))
        seen = set()
        n_read = dups = 0
        for a, b in edges:
            n_read += 1
            ia = index.setdefault(a, len(index))
            ib = index.setdefault(b, len(index))
            key = (ia, ib) if ia <= ib else (ib, ia)
            if key in seen:
                dups += 1
                continue
            if ia == ib and not keep_self_edges:
                continue
            seen.add(key)
        if not index:
            raise DataError("graph has no nodes")
        n = len(index)
        if seen:
            pairs = np.array(sorted(seen), dtype=np.int64)
        else:
            pairs = np.empty((0, 2), dtype=np.int64)
        off = pairs[:, 0] != pairs[:, 1]
        rows = np.concatenate([pairs[:, 0], pairs[off, 1]])
        cols = np.concatenate([pairs[:, 1], pairs[off, 0]])
        adj = sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
        adj.sort_indices()
        n_self = int(np.count_nonzero(~off))
        labels = tuple(sorted(index, key=index.__getitem__))
        summary = LoadSummary(edges_read=n_read,
                              duplicate_edges=dups, self_edges=n_self,
                              n_nodes=n, n_edges=len(seen))
        return cls(labels, dict(index), adj, len(seen), n_self, summary)

    def index_of(self, label: str) -> int:
        return self.node_index[label]

    def neighbors(self, i: int) -> np.ndarray:
        a = self.adjacency
        return a.indices[a.indptr[i]:a.indptr[i + 1]]

    def edges(self) -> list[tuple[int, int]]:
        """Undirected edges as (i, j) with i <= j, sorted."""
        upper = sp.triu(self.adjacency, format="coo")
        return sorted(zip(upper.row.tolist(), upper.col.tolist()))

    def without_self_edges(self) -> sp.csr_matrix:
        adj = self.adjacency.tolil(copy=True)
        adj.setdiag(0)
        out = adj.tocsr()
        out.eliminate_zeros()
        out.sort_indices()
        return out

    def label_rank(self) -> np.ndarray:
        """Position of each node's label in lexicographic order."""
        order = sorted(range(self.n_nodes), key=self.node_labels.__getitem__)
        rank = np.empty(self.n_nodes, dtype=np.int64)
        rank[order] = np.arange(self.n_nodes)
        return rank

    def checksum(self) -> str:
        """Short digest of the labelled edge set; independent of node order."""
        h = hashlib.sha256()
        labels = self.node_labels
        for a, b in sorted(tuple(sorted((labels[i], labels[j]))) for i, j in self.edges()):
            h.update(f"{a}\t{b}\n".encode())
        for label in sorted(self.node_labels):
            h.update(label.encode())
            h.update(b"\0")
        return h.hexdigest()[:16]

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Graph with node ``i`` moved to position ``perm[i]``."""
        perm = np.asarray(perm)
        labels = [""] * self.n_nodes
        for old, new in enumerate(perm):
            labels[new] = self.node_labels[old]
        edges = [(self.node_labels[i], self.node_labels[j]) for i, j in self.edges()]
        return Graph.from_edges(edges, nodes=labels)


def load_graph(path, delimiter: str | None = None, comment: str = "#",
               extra_columns: bool = False, keep_self_edges: bool = True) -> Graph:
    """Read an edge list: two identifier columns per line.

    Blank lines and lines starting with ``comment`` are skipped. With
    ``extra_columns`` any columns past the second are ignored; otherwise
    they make the line malformed.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read edge list {path}: {exc.strerror or exc}") from exc
    except UnicodeDecodeError as exc:
        raise GraphFormatError(f"not UTF-8 text ({exc.reason})", path) from exc

    def pairs():
        for lineno, line in enumerate(text.splitlines(), start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith(comment):
                continue
            fields = stripped.split(delimiter)
            if len(fields) < 2 or (len(fields) > 2 and not extra_columns):
                raise GraphFormatError(
                    f"expected 2 columns, found {len(fields)}", path, lineno)
            a, b = fields[0].strip(), fields[1].strip()
            if not a or not b:
                raise GraphFormatError("empty identifier", path, lineno)
            yield a, b

    try:
        g = Graph.from_edges(pairs(), keep_self_edges=keep_self_edges)
    except GraphFormatError:
        raise
    except DataError as exc:
        raise GraphFormatError("empty graph", path) from exc
    if g.n_edges == 0:
        raise GraphFormatError("empty graph", path)
    return g


def degrees(g: Graph) -> np.ndarray:
    """Row sums of the adjacency: a self-edge adds 1."""
    return np.diff(g.adjacency.indptr).astype(np.int64)


def bfs_distances(g: Graph, source: int) -> np.ndarray:
    """Hop distances from ``source``; unreachable nodes hold ``UNREACHABLE`` (-1)."""
    if not 0 <= source < g.n_nodes:
        raise IndexError(f"source {source} out of range for {g.n_nodes} nodes")
    return kernels.bfs_distances(g.adjacency, source)


@dataclass(frozen=True)
class GraphStats:
    n_nodes: int
    n_edges: int
    avg_degree: float
    density: float
    avg_clustering: float
    assortativity: float
    n_self_edges: int

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        if math.isnan(d["assortativity"]):
            d["assortativity"] = None
        return d


def local_clustering(g: Graph) -> np.ndarray:
    adj = g.without_self_edges()
    k = np.diff(adj.indptr).astype(np.float64)
    tri = kernels.triangle_counts(adj).astype(np.float64)
    out = np.zeros(g.n_nodes)
    ok = k >= 2
    out[ok] = 2.0 * tri[ok] / (k[ok] * (k[ok] - 1.0))
    return out


def degree_assortativity(g: Graph) -> float:
    """Pearson correlation of degrees across edge endpoints (self-edges skipped).

    Returns NaN when undefined (no edges, or every endpoint degree equal).
    """
    deg = degrees(g).astype(np.float64)
    adj = g.without_self_edges().tocoo()
    if adj.nnz == 0:
        return math.nan
    x = deg[adj.row]
    y = deg[adj.col]
    x = x - x.mean()
    y = y - y.mean()
    denom = math.sqrt(float(x @ x) * float(y @ y))
    if denom == 0.0:
        return math.nan
    return float(x @ y) / denom


def compute_stats(g: Graph) -> GraphStats:
    """Summary statistics in the layout of a network-properties table.

    ``avg_degree`` is 2m/n with a self-edge counted as one edge; density
    uses the non-self edges over n(n-1)/2.
    """
    n = g.n_nodes
    if n < 1:
        raise DataError("graph has no nodes")
    pairs = n * (n - 1) / 2
    density = (g.n_edges - g.n_self_edges) / pairs if pairs else 0.0
    return GraphStats(
        n_nodes=n,
        n_edges=g.n_edges,
        avg_degree=2.0 * g.n_edges / n,
        density=density,
        avg_clustering=float(local_clustering(g).mean()),
        assortativity=degree_assortativity(g),
        n_self_edges=g.n_self_edges,
    )
