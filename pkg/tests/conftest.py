import networkx as nx
import numpy as np
import pytest

from qwprio.graph import Graph
from qwprio.kernels import BACKEND

BACKENDS = ["python", "cython"] if BACKEND == "cython" else ["python"]


def graph_from_nx(G):
    nodes = [str(v) for v in G.nodes()]
    return Graph.from_edges([(str(a), str(b)) for a, b in G.edges()], nodes=nodes)


def make_graph(edges, nodes=()):
    return Graph.from_edges(edges, nodes=nodes)


def random_graph(rng, n_lo=5, n_hi=200, p_lo=0.05, p_hi=0.3):
    n = int(rng.integers(n_lo, n_hi + 1))
    p = float(rng.uniform(p_lo, p_hi))
    return graph_from_nx(nx.gnp_random_graph(n, p, seed=int(rng.integers(2**31))))


def dense_propagator(h, t):
    w, v = np.linalg.eigh(h.toarray() if hasattr(h, "toarray") else h)
    return (v * np.exp(-1j * t * w)) @ v.conj().T


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


@pytest.fixture
def path2():
    return make_graph([("a", "b")])


@pytest.fixture
def path3():
    return make_graph([("a", "b"), ("b", "c")])


@pytest.fixture
def triangle():
    return make_graph([("a", "b"), ("b", "c"), ("a", "c")])


@pytest.fixture
def star4():
    return make_graph([("c", f"l{i}") for i in range(4)])


@pytest.fixture
def toy_module_graph():
    """20 nodes: a 6-clique module M*, each member tied to one node of a 14-ring B*."""
    mod = [f"M{i}" for i in range(6)]
    edges = [(a, b) for i, a in enumerate(mod) for b in mod[i + 1:]]
    ring = [f"B{i}" for i in range(14)]
    edges += [(ring[i], ring[(i + 1) % 14]) for i in range(14)]
    edges += [(f"M{i}", f"B{2 * i}") for i in range(6)]
    return make_graph(edges), mod


# --- acceptance reporting ------------------------------------------------------

ACCEPTANCE_RESULTS = {}


class _Criterion:
    def __init__(self, number, title):
        self.number, self.title, self.details = number, title, []

    def note(self, text):
        self.details.append(text)

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        status = "PASS" if exc_type is None else ("SKIP" if exc_type is pytest.skip.Exception
                                                  else "FAIL")
        detail = "; ".join(self.details) or (str(exc).splitlines()[0] if exc else "")
        line = f"criterion {self.number} [{status}] {self.title}" + (f": {detail}" if detail else "")
        ACCEPTANCE_RESULTS.setdefault(self.number, []).append(line)
        print(line)
        return False


@pytest.fixture
def criterion():
    return _Criterion


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        for line in ACCEPTANCE_RESULTS[number]:
            terminalreporter.write_line(line)
