"""Classical comparison methods: diffusion kernel, RWR, DIAMOnD, neighbourhood."""
from __future__ import annotations

import logging

import numpy as np
import scipy.sparse as sp

from . import kernels
from .errors import ConvergenceError, DataError
from .graph import Graph, degrees
from .hypergeom import log_factorials
from .qwalk import DEFAULT_TOL, _seed_indices, expm_multiply
from .scores import ScoreVector

log = logging.getLogger(__name__)

DK_T = 0.3
RWR_RESTART = 0.4
DIAMOND_WEIGHT = 9


def _require_seeds(seeds, method):
    idx = _seed_indices(seeds)
    if not idx:
        raise DataError(f"{method} needs at least one seed")
    return idx


def laplacian(g: Graph) -> sp.csr_matrix:
    """L = D - A with D the adjacency row sums."""
    lap = (sp.diags(degrees(g).astype(np.float64)) - g.adjacency).tocsr()
    lap.eliminate_zeros()
    lap.sort_indices()
    return lap


def score_dk(g: Graph, seeds, t: float = DK_T, tol: float = DEFAULT_TOL) -> ScoreVector:
    """Heat-kernel score sum_s [exp(-t L)]_{vs}.

    Summing columns equals one propagation of the seed indicator vector.
    """
    idx = _require_seeds(seeds, "DK")
    if not t >= 0:
        raise DataError(f"DK time must be >= 0, got {t}")
    indicator = np.zeros(g.n_nodes)
    indicator[list(idx)] = 1.0
    heat = expm_multiply(laplacian(g), t, indicator, kind="heat", tol=tol)
    return ScoreVector("DK", heat.real.copy(), {"t": t, "tolerance": tol}, idx)


def transition_matrix(g: Graph) -> sp.csr_matrix:
    """Column-stochastic W = A D^-1; degree-0 columns become self-loops."""
    deg = degrees(g).astype(np.float64)
    dangling = np.flatnonzero(deg == 0)
    inv = np.zeros_like(deg)
    inv[deg > 0] = 1.0 / deg[deg > 0]
    w = g.adjacency @ sp.diags(inv)
    if dangling.size:
        w = w + sp.csr_matrix((np.ones(dangling.size), (dangling, dangling)),
                              shape=w.shape)
    return sp.csr_matrix(w)


def score_rwr(g: Graph, seeds, restart: float = RWR_RESTART, tol: float = 1e-10,
              max_iter: int = 10_000) -> ScoreVector:
    """Stationary vector of p <- (1 - r) W p + r p0, p0 uniform on the seeds."""
    idx = _require_seeds(seeds, "RWR")
    if not 0 < restart < 1:
        raise DataError(f"restart probability must lie in (0, 1), got {restart}")
    w = transition_matrix(g)
    p0 = np.zeros(g.n_nodes)
    p0[list(idx)] = 1.0 / len(idx)
    p = p0.copy()
    for it in range(1, max_iter + 1):
        nxt = (1 - restart) * (w @ p) + restart * p0
        delta = np.abs(nxt - p).sum()
        p = nxt
        if delta <= tol:
            break
    else:
        raise ConvergenceError(f"RWR did not converge in {max_iter} iterations (delta={delta:.3g})")
    return ScoreVector("RWR", p, {"restart": restart, "tol": tol, "iterations": it}, idx)


def diamond_order(g: Graph, seeds, n_rank: int, weight: int = DIAMOND_WEIGHT,
                  backend: str | None = None) -> np.ndarray:
    """Nodes in the order DIAMOnD adds them to the module.

    At each step every node linked to the module is tested for how
    surprising its number of module links is (upper hypergeometric tail);
    the smallest p-value wins, ties going to the lower degree and then the
    lexicographically smaller label. Seeds count ``weight`` times: in a
    candidate's module links, in the module size and in the universe.
    """
    idx = _require_seeds(seeds, "DIA")
    if n_rank < 1:
        raise DataError(f"n_rank must be >= 1, got {n_rank}")
    if weight < 1:
        raise DataError(f"seed weight must be >= 1, got {weight}")
    adj = g.without_self_edges()
    deg = np.diff(adj.indptr).astype(np.int64)
    is_seed = np.zeros(g.n_nodes, dtype=bool)
    is_seed[list(idx)] = True
    universe = g.n_nodes + (weight - 1) * len(idx)
    logfact = log_factorials(universe + int(deg.max(initial=0)) * weight + 1)
    order = kernels.diamond_expand(adj, is_seed, n_rank, weight, deg,
                                   g.label_rank(), logfact, backend=backend)
    if len(order) < n_rank:
        log.warning("DIAMOnD exhausted the seeds' components after %d of %d additions",
                    len(order), n_rank)
    return order


def score_diamond(g: Graph, seeds, n_rank: int, alpha_w: int = DIAMOND_WEIGHT,
                  backend: str | None = None) -> ScoreVector:
    """Rank-encoded DIAMOnD scores: the i-th added node scores n_rank - i + 1."""
    order = diamond_order(g, seeds, n_rank, alpha_w, backend=backend)
    scores = np.zeros(g.n_nodes)
    scores[order] = n_rank - np.arange(len(order))
    return ScoreVector("DIA", scores,
                       {"n_rank": n_rank, "alpha_w": alpha_w, "added": len(order)},
                       _seed_indices(seeds))


def score_nbr(g: Graph, seeds) -> ScoreVector:
    """Fraction of each non-seed node's neighbours that are seeds."""
    idx = _seed_indices(seeds)
    mask = np.zeros(g.n_nodes)
    mask[list(idx)] = 1.0
    deg = degrees(g).astype(np.float64)
    hits = g.adjacency @ mask
    scores = np.zeros(g.n_nodes)
    ok = deg > 0
    scores[ok] = hits[ok] / deg[ok]
    scores[list(idx)] = 0.0
    return ScoreVector("NBR", scores, {}, idx)
