"""Upper-tail hypergeometric probabilities computed in log space."""
import math
from functools import lru_cache

import numpy as np

from ._pykernels import log_tail
from .errors import DataError


@lru_cache(maxsize=8)
def _logfact_table(size):
    table = np.array([math.lgamma(i + 1.0) for i in range(size + 1)])
    table.setflags(write=False)
    return table


def log_factorials(n):
    """Array whose i-th entry is log(i!) for i = 0..n."""
    # round up so nearby sizes share one cached table
    size = 1 << max(int(n), 1).bit_length()
    return _logfact_table(size)


def log_sf(x, population, successes, draws):
    """log P(X >= x) for X ~ Hypergeom(population, successes, draws)."""
    return log_tail(int(x), int(population), int(successes), int(draws),
                    log_factorials(population))


def sf(x, population, successes, draws):
    """P(X >= x) for X ~ Hypergeom(population, successes, draws)."""
    return math.exp(log_sf(x, population, successes, draws))


def connectivity_pvalue(n_nodes, n_seeds, degree, seed_links):
    """Probability that a node of ``degree`` has at least ``seed_links`` seed
    neighbours when its links land uniformly among ``n_nodes`` nodes of which
    ``n_seeds`` are seeds."""
    return sf(seed_links, n_nodes, n_seeds, degree)


def enrichment_pvalue(universe, module_size, selection_size, overlap):
    """P(overlap >= observed) when ``selection_size`` genes are drawn at random
    from ``universe`` genes of which ``module_size`` belong to the module."""
    counts = (universe, module_size, selection_size, overlap)
    if any(int(c) != c or c < 0 for c in counts):
        raise DataError(f"counts must be non-negative integers, got {counts}")
    if module_size > universe or selection_size > universe:
        raise DataError("module and selection must fit inside the universe")
    if overlap > min(module_size, selection_size):
        raise DataError("overlap exceeds the module or selection size")
    if overlap == 0:
        return 1.0
    return sf(overlap, universe, module_size, selection_size)
