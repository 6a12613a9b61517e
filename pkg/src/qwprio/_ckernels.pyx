# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the kernels in ``_pykernels``.

Signatures and results match the NumPy versions; ``diamond_expand`` and
``log_tail`` are bit-identical to them.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log, INFINITY

cnp.import_array()

cdef enum:
    _UNREACH = -1
UNREACHABLE = _UNREACH


def chebyshev_series(const int[::1] indptr, const int[::1] indices,
                     const double[::1] data, double center, double radius,
                     const double complex[::1] coeffs, block):
    cdef Py_ssize_t n = block.shape[0]
    cdef Py_ssize_t m = block.shape[1]
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] prev_a = np.array(block, dtype=np.complex128, order="C", copy=True)
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] cur_a = np.empty((n, m), dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] out_a = np.empty((n, m), dtype=np.complex128)
    cdef double complex[:, ::1] prev = prev_a
    cdef double complex[:, ::1] cur = cur_a
    cdef double complex[:, ::1] out = out_a
    cdef double complex[:, ::1] tmp
    cdef Py_ssize_t i, j, p, k, nk = coeffs.shape[0]
    cdef double complex acc, c
    cdef double scale = 1.0 / radius
    cdef double scale2 = 2.0 / radius

    c = coeffs[0]
    for i in range(n):
        for j in range(m):
            out[i, j] = c * prev[i, j]
    if nk == 1:
        return out_a

    c = coeffs[1]
    with nogil:
        for i in range(n):
            for j in range(m):
                acc = 0.0
                for p in range(indptr[i], indptr[i + 1]):
                    acc = acc + data[p] * prev[indices[p], j]
                cur[i, j] = (acc - center * prev[i, j]) * scale
                out[i, j] = out[i, j] + c * cur[i, j]

        for k in range(2, nk):
            c = coeffs[k]
            # prev <- 2 H~ cur - prev, computed in place, then swap roles
            for i in range(n):
                for j in range(m):
                    acc = 0.0
                    for p in range(indptr[i], indptr[i + 1]):
                        acc = acc + data[p] * cur[indices[p], j]
                    prev[i, j] = (acc - center * cur[i, j]) * scale2 - prev[i, j]
                    out[i, j] = out[i, j] + c * prev[i, j]
            tmp = prev
            prev = cur
            cur = tmp
    return out_a


def bfs_distances(const int[::1] indptr, const int[::1] indices, Py_ssize_t source):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef cnp.ndarray[cnp.int64_t, ndim=1] dist_a = np.full(n, _UNREACH, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] queue_a = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] dist = dist_a
    cdef cnp.int64_t[::1] queue = queue_a
    cdef Py_ssize_t head = 0, tail = 0, u, v, p
    dist[source] = 0
    queue[tail] = source
    tail += 1
    with nogil:
        while head < tail:
            u = queue[head]
            head += 1
            for p in range(indptr[u], indptr[u + 1]):
                v = indices[p]
                if dist[v] == _UNREACH:
                    dist[v] = dist[u] + 1
                    queue[tail] = v
                    tail += 1
    return dist_a


def triangle_counts(const int[::1] indptr, const int[::1] indices):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef cnp.ndarray[cnp.int64_t, ndim=1] tri_a = np.zeros(n, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] mark_a = np.full(n, -1, dtype=np.int64)
    cdef cnp.int64_t[::1] tri = tri_a
    cdef cnp.int64_t[::1] mark = mark_a
    cdef Py_ssize_t u, v, w, p, q
    cdef cnp.int64_t count
    with nogil:
        for u in range(n):
            for p in range(indptr[u], indptr[u + 1]):
                mark[indices[p]] = u
            count = 0
            for p in range(indptr[u], indptr[u + 1]):
                v = indices[p]
                for q in range(indptr[v], indptr[v + 1]):
                    w = indices[q]
                    if w != u and mark[w] == u:
                        count += 1
            tri[u] = count // 2
    return tri_a


cdef double _log_tail(Py_ssize_t x, Py_ssize_t population, Py_ssize_t successes,
                      Py_ssize_t draws, const double[::1] lf) noexcept nogil:
    cdef Py_ssize_t lo = x, hi = draws, support_lo = draws - (population - successes), i
    cdef double base, term, top, acc, value
    if support_lo < 0:
        support_lo = 0
    if x <= support_lo:
        return 0.0
    if successes < hi:
        hi = successes
    if lo > hi:
        return -INFINITY
    base = (lf[draws] + lf[population - draws]
            - lf[population] + lf[successes]
            + lf[population - successes])
    top = -INFINITY
    for i in range(lo, hi + 1):
        term = (base - lf[i] - lf[successes - i]
                - lf[draws - i]
                - lf[population - successes - draws + i])
        if term > top:
            top = term
    acc = 0.0
    for i in range(lo, hi + 1):
        term = (base - lf[i] - lf[successes - i]
                - lf[draws - i]
                - lf[population - successes - draws + i])
        acc = acc + exp(term - top)
    value = top + log(acc)
    if value < 0.0:
        return value
    return 0.0


def log_tail(Py_ssize_t x, Py_ssize_t population, Py_ssize_t successes,
             Py_ssize_t draws, const double[::1] logfact):
    return _log_tail(x, population, successes, draws, logfact)


def diamond_expand(const int[::1] indptr, const int[::1] indices, is_seed,
                   Py_ssize_t n_rank, Py_ssize_t weight,
                   const cnp.int64_t[::1] degree, const cnp.int64_t[::1] label_rank,
                   const double[::1] logfact):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] in_mod_a = np.asarray(is_seed, dtype=np.uint8).copy()
    cdef cnp.uint8_t[::1] in_module = in_mod_a
    cdef cnp.int64_t[::1] seed_links = np.zeros(n, dtype=np.int64)
    cdef cnp.int64_t[::1] added_links = np.zeros(n, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] added_a = np.empty(n_rank, dtype=np.int64)
    cdef cnp.int64_t[::1] added = added_a
    cdef Py_ssize_t n_seeds = 0, n_added = 0, s, p, v, best
    cdef Py_ssize_t universe, module_size, k, kb
    cdef double lp, best_lp

    for s in range(n):
        if in_module[s]:
            n_seeds += 1
            for p in range(indptr[s], indptr[s + 1]):
                seed_links[indices[p]] += 1
    universe = n + (weight - 1) * n_seeds

    with nogil:
        while n_added < n_rank:
            module_size = weight * n_seeds + n_added
            best = -1
            best_lp = INFINITY
            for v in range(n):
                if in_module[v] or seed_links[v] + added_links[v] == 0:
                    continue
                kb = weight * seed_links[v] + added_links[v]
                k = degree[v] + (weight - 1) * seed_links[v]
                lp = _log_tail(kb, universe, module_size, k, logfact)
                if (best < 0 or lp < best_lp
                        or (lp == best_lp and (degree[v] < degree[best]
                            or (degree[v] == degree[best]
                                and label_rank[v] < label_rank[best])))):
                    best = v
                    best_lp = lp
            if best < 0:
                break
            added[n_added] = best
            n_added += 1
            in_module[best] = 1
            for p in range(indptr[best], indptr[best + 1]):
                added_links[indices[p]] += 1
    return added_a[:n_added].copy()
