"""NumPy/SciPy implementations of the hot kernels.

Every function here has a twin with the same signature in ``_ckernels.pyx``.
Graph arguments are the raw CSR arrays (``indptr``, ``indices``, ``data``)
so both backends can be called identically.
"""
import math

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph

UNREACHABLE = -1


def _csr(indptr, indices, data, n):
    return sp.csr_matrix((data, indices, indptr), shape=(n, n))


def chebyshev_series(indptr, indices, data, center, radius, coeffs, block):
    """Return ``sum_k coeffs[k] * T_k((H - center) / radius) @ block``.

    ``block`` is a complex (n, m) array; the result has the same shape.
    """
    n = block.shape[0]
    h = _csr(indptr, indices, data, n)
    prev = np.array(block, dtype=np.complex128, copy=True)
    out = coeffs[0] * prev
    if len(coeffs) == 1:
        return out
    cur = (h @ prev - center * prev) / radius
    out += coeffs[1] * cur
    for c in coeffs[2:]:
        nxt = (2.0 / radius) * (h @ cur - center * cur) - prev
        out += c * nxt
        prev, cur = cur, nxt
    return out


def bfs_distances(indptr, indices, source):
    n = len(indptr) - 1
    adj = _csr(indptr, indices, np.ones(len(indices)), n)
    dist = csgraph.shortest_path(adj, method="D", unweighted=True, indices=source)
    out = np.full(n, UNREACHABLE, dtype=np.int64)
    finite = np.isfinite(dist)
    out[finite] = dist[finite].astype(np.int64)
    return out


def triangle_counts(indptr, indices):
    """Triangles through each node; ``indices`` must not contain self-loops."""
    n = len(indptr) - 1
    adj = _csr(indptr, indices, np.ones(len(indices)), n)
    paths = (adj @ adj).multiply(adj)
    return np.asarray(paths.sum(axis=1)).ravel().astype(np.int64) // 2


def log_tail(x, population, successes, draws, logfact):
    """log P(X >= x) for X ~ Hypergeom(population, successes, draws).

    ``logfact[i]`` must hold log(i!) for i up to ``population``.
    Terms are accumulated sequentially so the result is bit-identical to
    the compiled kernel.
    """
    support_lo = max(draws - (population - successes), 0)
    hi = min(draws, successes)
    if x <= support_lo:
        return 0.0
    lo = x
    if lo > hi:
        return -math.inf
    base = (logfact[draws] + logfact[population - draws]
            - logfact[population] + logfact[successes]
            + logfact[population - successes])
    terms = []
    for i in range(lo, hi + 1):
        terms.append(base - logfact[i] - logfact[successes - i]
                     - logfact[draws - i]
                     - logfact[population - successes - draws + i])
    top = max(terms)
    acc = 0.0
    for term in terms:
        acc += math.exp(term - top)
    value = top + math.log(acc)
    return value if value < 0.0 else 0.0


def diamond_expand(indptr, indices, is_seed, n_rank, weight, degree,
                   label_rank, logfact):
    """Grow a module from the seeds, returning added nodes in order.

    Seeds count ``weight`` times in link counts, module size and universe.
    Candidates are ordered by (log p-value, degree, label rank).
    """
    n = len(indptr) - 1
    in_module = np.asarray(is_seed, dtype=bool).copy()
    n_seeds = int(in_module.sum())
    seed_links = np.zeros(n, dtype=np.int64)
    added_links = np.zeros(n, dtype=np.int64)
    for s in np.flatnonzero(in_module):
        np.add.at(seed_links, indices[indptr[s]:indptr[s + 1]], 1)

    universe = n + (weight - 1) * n_seeds
    added = []
    while len(added) < n_rank:
        module_size = weight * n_seeds + len(added)
        cand = np.flatnonzero(~in_module & ((seed_links + added_links) > 0))
        if cand.size == 0:
            break
        kb = weight * seed_links[cand] + added_links[cand]
        k = degree[cand] + (weight - 1) * seed_links[cand]
        cache = {}
        best = None
        for v, kv, kbv in zip(cand.tolist(), k.tolist(), kb.tolist()):
            key = (kv, kbv)
            lp = cache.get(key)
            if lp is None:
                lp = log_tail(kbv, universe, module_size, kv, logfact)
                cache[key] = lp
            rank = (lp, int(degree[v]), int(label_rank[v]))
            if best is None or rank < best[0]:
                best = (rank, v)
        node = best[1]
        added.append(node)
        in_module[node] = True
        np.add.at(added_links, indices[indptr[node]:indptr[node + 1]], 1)
    return np.asarray(added, dtype=np.int64)
