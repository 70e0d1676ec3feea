"""Fixtures compartidas de la suite"""
import pytest
import networkx as nx

from app.config import settings
from app.core.graph import Graph, generate_random_graph

def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run acceptance-size tests")

def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)

@pytest.fixture(autouse=True)
def check_preconditions(monkeypatch):
    """Test builds verify expensive preconditions against the oracle"""
    monkeypatch.setattr(settings, "CHECK_PRECONDITIONS", True)

@pytest.fixture
def path_graph():
    """Undirected path 0 - 1 - 2 - 3 - 4 - 5 with unit weights"""
    return Graph(6, [(i, i + 1, 1.0) for i in range(5)], directed=False)

@pytest.fixture
def diamond_graph():
    """
    0 -> 1 -> 3 costs 4 in two hops, 0 -> 2 -> 3 costs 4 too,
    0 -> 3 directly costs 4 in one hop; 3 -> 4 closes the chain
    """
    return Graph(5, [(0, 1, 1.0), (1, 3, 3.0), (0, 2, 2.0), (2, 3, 2.0), (0, 3, 4.0), (3, 4, 1.0)])

@pytest.fixture
def negative_cycle_graph():
    return Graph(4, [(0, 1, 1.0), (1, 2, -5.0), (2, 0, 1.0), (2, 3, 2.0)])

@pytest.fixture
def random_graph():
    def make(n, p=0.3, seed=0, low=0.0, high=100.0, directed=True, zero=0.0):
        return generate_random_graph(
            n, p, low, high, seed=seed, directed=directed, integer_weights=True, zero_weight_fraction=zero
        )
    return make

def to_networkx(graph: Graph) -> nx.DiGraph:
    g = nx.DiGraph()
    g.add_nodes_from(range(graph.node_count))
    g.add_weighted_edges_from(graph.arcs)
    return g

def weakly_connected(graph: Graph) -> bool:
    return nx.is_weakly_connected(to_networkx(graph))
