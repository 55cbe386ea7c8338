import numpy as np
import pytest
from hypothesis import strategies as st

from qpe.graphcore import Graph

ACCEPTANCE = []


def random_graph(rng, n, p=0.5):
    upper = np.triu(rng.random((n, n)) < p, 1)
    return Graph((upper | upper.T).astype(np.uint8))


@st.composite
def graphs(draw, min_nodes=1, max_nodes=9):
    n = draw(st.integers(min_nodes, max_nodes))
    bits = draw(st.lists(st.booleans(), min_size=n * (n - 1) // 2, max_size=n * (n - 1) // 2))
    adj = np.zeros((n, n), dtype=np.uint8)
    adj[np.triu_indices(n, 1)] = bits
    return Graph(adj | adj.T)


@st.composite
def graphs_with_perm(draw, min_nodes=1, max_nodes=9):
    g = draw(graphs(min_nodes, max_nodes))
    perm = draw(st.permutations(list(range(g.n))))
    return g, np.array(perm)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def record():
    """Collect one pass/fail line per acceptance criterion."""

    def _record(label, passed, detail=""):
        ACCEPTANCE.append((label, bool(passed), detail))
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, detail in ACCEPTANCE:
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] {label}" + (f" ({detail})" if detail else ""))
