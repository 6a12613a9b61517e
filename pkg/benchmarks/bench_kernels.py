"""Time the compiled kernels against the NumPy/SciPy fallback.

    python3 benchmarks/bench_kernels.py [--n 5000] [--repeat 3]

Each kernel runs on the same preferential-attachment graph with both
backends; outputs are checked for agreement before timings are reported.
"""
import argparse
import time

import networkx as nx
import numpy as np

from qwprio import kernels
from qwprio.graph import Graph, degrees
from qwprio.hypergeom import log_factorials
from qwprio.qwalk import build_hamiltonian, chebyshev_coefficients, gershgorin_bounds


def best_of(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - start)
    return best, out


def cases(g, seeds):
    adj = g.adjacency
    h = build_hamiltonian(g, seeds, 5.0).matrix
    lo, hi = gershgorin_bounds(h)
    coeffs = chebyshev_coefficients("unitary", 0.11, (lo + hi) / 2, (hi - lo) / 2, 1e-12)
    block = np.zeros((g.n_nodes, 32), dtype=np.complex128)
    block[seeds[:32], np.arange(32)] = 1.0
    is_seed = np.zeros(g.n_nodes, dtype=np.int8)
    is_seed[seeds] = 1
    logfact = log_factorials(g.n_nodes + 9 * len(seeds) + 1)
    args = (adj, is_seed, 50, 9, degrees(g), g.label_rank(), logfact)
    return {
        f"chebyshev ({len(coeffs)} terms x 32 vectors)":
            lambda b: kernels.chebyshev_series(h, (lo + hi) / 2, (hi - lo) / 2, coeffs, block,
                                               backend=b),
        "bfs distances (one source)": lambda b: kernels.bfs_distances(adj, 0, backend=b),
        "triangle counts": lambda b: kernels.triangle_counts(adj, backend=b),
        "DIAMOnD expansion (50 nodes)": lambda b: kernels.diamond_expand(*args, backend=b),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=5000)
    parser.add_argument("--m", type=int, default=4)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    if kernels.BACKEND != "cython":
        raise SystemExit("compiled extension not built; nothing to compare")
    G = nx.barabasi_albert_graph(args.n, args.m, seed=0)
    g = Graph.from_edges([(str(a), str(b)) for a, b in G.edges()])
    seeds = np.random.default_rng(0).choice(g.n_nodes, 64, replace=False)
    print(f"graph: n={g.n_nodes} m={g.n_edges}, best of {args.repeat}")
    print(f"{'kernel':<42}{'python':>10}{'cython':>10}{'speedup':>9}")
    for name, fn in cases(g, seeds).items():
        t_py, out_py = best_of(lambda: fn("python"), args.repeat)
        t_c, out_c = best_of(lambda: fn("cython"), args.repeat)
        if not np.allclose(out_py, out_c, rtol=1e-10, atol=1e-12):
            raise SystemExit(f"{name}: backends disagree")
        print(f"{name:<42}{t_py * 1e3:>8.1f}ms{t_c * 1e3:>8.1f}ms{t_py / t_c:>8.1f}x")


if __name__ == "__main__":
    main()
