import numpy as np
import pytest
from hypothesis import strategies as st

from lacentrality.graph import ConditioningMode, DegreeConditioning, DirectedGraph, parse_edge_list

# conditioning that leaves every non-zero degree untouched
RAW = DegreeConditioning(0.01, ConditioningMode.ZERO_ONLY)


def erdos_renyi(n, mean_degree, seed):
    rng = np.random.default_rng(seed)
    mask = rng.random((n, n)) < mean_degree / (n - 1)
    np.fill_diagonal(mask, False)
    u, v = np.nonzero(mask)
    return DirectedGraph.from_edges(n, zip(u.tolist(), v.tolist()))


@st.composite
def digraphs(draw, min_nodes=2, max_nodes=12, min_edges=1):
    n = draw(st.integers(min_nodes, max_nodes))
    pairs = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda e: e[0] != e[1])
    edges = draw(st.lists(pairs, min_size=min_edges, max_size=4 * n))
    return DirectedGraph.from_edges(n, edges)


@pytest.fixture
def two_cycle():
    return parse_edge_list("a\tb\nb\ta")


@pytest.fixture
def clique4():
    return DirectedGraph.from_edges(4, [(i, j) for i in range(4) for j in range(4) if i != j])


ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    marker = ACCEPTANCE_MARKERS.get(report.nodeid)
    if marker is not None:
        number, title = marker
        prev = ACCEPTANCE.get(number, (title, True))
        ACCEPTANCE[number] = (title, prev[1] and report.passed)


ACCEPTANCE_MARKERS = {}


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("acceptance")
        if m is not None:
            ACCEPTANCE_MARKERS[item.nodeid] = m.args


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, ok = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {title}")
