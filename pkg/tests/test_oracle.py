import itertools
import math

import networkx as nx
import numpy as np
import pytest

from app.core.exceptions import InvalidParameterError, NegativeCycleError, NegativeWeightError
from app.core.graph import Graph
from app.services.oracle_service import (
    bfs_eccentricity,
    canonical_cycle,
    canonical_path,
    dist_through_oracle,
    find_negative_cycle,
    hop_matrix,
    oracle_apsp,
    oracle_hop_bounded,
    undirected_diameter,
)
from app.utils.constants import Direction

from conftest import to_networkx

INF = math.inf

def enumerate_simple_paths(graph: Graph) -> np.ndarray:
    """Exhaustive minimum over simple paths; only for tiny graphs"""
    n = graph.node_count
    best = np.full((n, n), INF)
    np.fill_diagonal(best, 0.0)
    g = to_networkx(graph)
    for s, t in itertools.permutations(range(n), 2):
        for path in nx.all_simple_paths(g, s, t):
            weight = sum(graph.weight(a, b) for a, b in zip(path, path[1:]))
            best[s, t] = min(best[s, t], weight)
    return best

@pytest.mark.parametrize("seed", range(6))
def test_matches_networkx(random_graph, seed):
    g = random_graph(14, p=0.25, seed=seed)
    expected = nx.floyd_warshall_numpy(to_networkx(g), nodelist=range(g.node_count), weight="weight")
    assert np.array_equal(oracle_apsp(g), np.asarray(expected))

@pytest.mark.parametrize("seed", range(4))
def test_matches_path_enumeration(random_graph, seed):
    g = random_graph(7, p=0.4, seed=seed, low=-5, high=20)
    try:
        dist = oracle_apsp(g)
    except NegativeCycleError:
        assert find_negative_cycle(g) is not None
        return
    assert np.array_equal(dist, enumerate_simple_paths(g))

@pytest.mark.parametrize("seed", range(4))
def test_relabeling_permutes_the_matrix(random_graph, seed):
    g = random_graph(15, p=0.25, seed=seed, low=-3, high=40)
    try:
        dist = oracle_apsp(g)
    except NegativeCycleError:
        pytest.skip("generated graph has a negative cycle")
    perm = np.random.default_rng(seed).permutation(g.node_count)
    relabeled = Graph(g.node_count, [(perm[u], perm[v], w) for u, v, w in g.edges])
    moved = oracle_apsp(relabeled)
    assert np.array_equal(moved[np.ix_(perm, perm)], dist)

def test_unreachable_is_inf():
    g = Graph(3, [(0, 1, 2.0)])
    dist = oracle_apsp(g)
    assert dist[0, 1] == 2.0
    assert dist[1, 0] == INF
    assert dist[2, 0] == INF

def test_negative_cycle_reported(negative_cycle_graph):
    with pytest.raises(NegativeCycleError) as exc:
        oracle_apsp(negative_cycle_graph)
    assert exc.value.cycle == [0, 1, 2, 0]

def test_find_negative_cycle_none_without_cycle(diamond_graph):
    assert find_negative_cycle(diamond_graph) is None

def test_canonical_cycle_rotation():
    assert canonical_cycle([3, 1, 2]) == [1, 2, 3, 1]
    assert canonical_cycle([]) == []

def test_hop_matrix_prefers_fewer_hops(diamond_graph):
    dist, hops = hop_matrix(diamond_graph)
    assert dist[0, 3] == 4.0
    assert hops[0, 3] == 1
    assert hops[0, 4] == 2
    assert hops[4, 0] == INF

def test_canonical_path(diamond_graph):
    assert canonical_path(diamond_graph, 0, 4) == [0, 3, 4]
    assert canonical_path(diamond_graph, 0, 0) == [0]
    assert canonical_path(diamond_graph, 4, 0) is None

def test_canonical_path_lexicographic_tie():
    g = Graph(4, [(0, 2, 1.0), (2, 3, 1.0), (0, 1, 1.0), (1, 3, 1.0)])
    assert canonical_path(g, 0, 3) == [0, 1, 3]

def test_hop_bounded(diamond_graph):
    one = oracle_hop_bounded(diamond_graph, 1)
    assert np.array_equal(one, diamond_graph.weight_matrix())
    assert oracle_hop_bounded(diamond_graph, 0)[0, 1] == INF
    assert np.array_equal(oracle_hop_bounded(diamond_graph, 10), oracle_apsp(diamond_graph))

def test_hop_bounded_between_extremes(path_graph):
    two = oracle_hop_bounded(path_graph, 2)
    assert two[0, 2] == 2.0
    assert two[0, 3] == INF

def test_hop_bounded_rejects_negative_input():
    with pytest.raises(NegativeWeightError):
        oracle_hop_bounded(Graph(2, [(0, 1, -1.0)]), 1)
    with pytest.raises(InvalidParameterError):
        oracle_hop_bounded(Graph(2, [(0, 1, 1.0)]), -1)

def test_dist_through(path_graph):
    dist = oracle_apsp(path_graph)
    out = dist_through_oracle({1: 10.0, 4: 0.0}, dist, [1, 4])
    assert out.tolist() == [4.0, 3.0, 2.0, 1.0, 0.0, 1.0]
    assert np.all(np.isinf(dist_through_oracle({}, dist, [])))

def test_bfs_helpers(path_graph):
    assert bfs_eccentricity(path_graph, 0) == 5
    assert bfs_eccentricity(path_graph, 2) == 3
    assert undirected_diameter(path_graph) == 5
    directed = Graph(3, [(0, 1, 1.0), (1, 2, 1.0)])
    assert bfs_eccentricity(directed, 2, Direction.UNIDIRECTIONAL) == 0
    assert bfs_eccentricity(directed, 2, Direction.BIDIRECTIONAL) == 2
