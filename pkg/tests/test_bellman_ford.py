import numpy as np
import pytest

from app.core.engine import CommunicationMode
from app.core.exceptions import InvalidParameterError, NegativeCycleError, NegativeWeightError
from app.core.graph import Graph, generate_random_graph
from app.services.bellman_ford_service import DistanceTable, distributed_bellman_ford, virtual_source_bellman_ford
from app.services.oracle_service import hop_matrix, oracle_apsp, oracle_hop_bounded
from app.utils.constants import Direction, Discipline
from app.utils.helpers import INF

MODES = [
    CommunicationMode(),
    CommunicationMode(direction=Direction.UNIDIRECTIONAL),
    CommunicationMode(discipline=Discipline.UNICAST),
]

def table_matrix(result, n):
    matrix = np.full((n, n), INF)
    for table in result.tables:
        for s, value in table.entries.items():
            matrix[s, table.owner] = value
    return matrix

def test_distance_table_only_decreases():
    table = DistanceTable(owner=3)
    assert table.get(1) == INF
    assert table.relax(1, 5.0)
    assert not table.relax(1, 5.0)
    assert table.relax(1, 4.0)
    assert 1 in table and 2 not in table

# ==========================================
# HOP-BOUNDED
# ==========================================

@pytest.mark.parametrize("h", [1, 2, 4, 16])
@pytest.mark.parametrize("seed", range(3))
def test_h_hop_accuracy(random_graph, h, seed):
    n = 16
    g = random_graph(n, p=0.2, seed=seed, zero=0.1)
    dist, hops = hop_matrix(g)
    bounded = oracle_hop_bounded(g, h)
    sources = list(range(0, n, 3))

    result = distributed_bellman_ford(g, sources, h, seed=seed)
    got = table_matrix(result, n)[sources]

    assert np.all(got >= bounded[sources])
    assert np.all(got >= dist[sources])
    exact = hops[sources] <= h
    assert np.array_equal(got[exact], dist[sources][exact])

@pytest.mark.parametrize("mode", MODES, ids=lambda m: m.label)
def test_single_source_equals_hop_bounded_oracle(random_graph, mode):
    g = random_graph(14, p=0.25, seed=9)
    for h in (1, 3, 13):
        result = distributed_bellman_ford(g, [4], h, mode=mode)
        got = np.array([t.get(4) for t in result.tables])
        assert np.array_equal(got, oracle_hop_bounded(g, h)[4])

def test_hop_counts_recorded(diamond_graph):
    result = distributed_bellman_ford(diamond_graph, [0], h=4)
    assert result.tables[3].get(0) == 4.0
    assert result.hops[3][0] == 1
    assert result.hops[4][0] == 2

def test_no_sources():
    g = Graph(3, [(0, 1, 1.0)])
    result = distributed_bellman_ford(g, [], h=2)
    assert result.metrics.rounds == 0
    assert all(not t.entries for t in result.tables)

def test_bad_inputs():
    g = Graph(3, [(0, 1, 1.0)])
    with pytest.raises(InvalidParameterError):
        distributed_bellman_ford(g, [0], h=0)
    with pytest.raises(InvalidParameterError):
        distributed_bellman_ford(g, [5], h=1)
    with pytest.raises(NegativeWeightError):
        distributed_bellman_ford(Graph(2, [(0, 1, -1.0)]), [0], h=1)

def test_transcript_recorded_on_request(path_graph):
    result = distributed_bellman_ford(path_graph, [0, 5], h=5, record_transcript=True)
    assert len(result.transcript) == sum(result.metrics.per_edge_load.values())
    assert max(entry.round for entry in result.transcript) == result.metrics.rounds
    assert distributed_bellman_ford(path_graph, [0], h=5).transcript is None

@pytest.mark.slow
@pytest.mark.parametrize("h", [1, 2, 4, 8, 32])
def test_h_hop_accuracy_at_acceptance_size(random_graph, h):
    n = 32
    for seed in range(30):
        g = random_graph(n, p=0.1, seed=seed, zero=0.1)
        dist, hops = hop_matrix(g)
        got = table_matrix(distributed_bellman_ford(g, range(n), h, seed=seed), n)
        assert np.all(got >= dist)
        assert np.all(got >= oracle_hop_bounded(g, h))
        exact = hops <= h
        assert np.array_equal(got[exact], dist[exact]), f"seed {seed}"

# ==========================================
# VIRTUAL SOURCE
# ==========================================

def negative_instances(count, n=10):
    found, seed = [], 0
    while len(found) < count:
        g = generate_random_graph(n, 0.3, -20, 100, seed=seed, integer_weights=True)
        seed += 1
        try:
            oracle_apsp(g)
        except NegativeCycleError:
            continue
        if g.has_negative_weights:
            found.append(g)
    return found

@pytest.mark.parametrize("graph", negative_instances(4), ids=lambda g: repr(g))
def test_potentials_are_virtual_source_distances(graph):
    result = virtual_source_bellman_ford(graph)
    dist = oracle_apsp(graph)
    expected = np.minimum(0.0, dist.min(axis=0))
    assert np.array_equal(np.asarray(result.potentials), expected)
    phi = result.potentials
    assert all(phi[u] + w - phi[v] >= 0 for u, v, w in graph.arcs)

def test_potentials_zero_without_negative_weights(diamond_graph):
    result = virtual_source_bellman_ford(diamond_graph)
    assert result.potentials == [0.0] * 5

def test_negative_cycle_detected(negative_cycle_graph):
    with pytest.raises(NegativeCycleError) as exc:
        virtual_source_bellman_ford(negative_cycle_graph)
    assert exc.value.cycle == [0, 1, 2, 0]
    assert exc.value.witness in (0, 1, 2, 3)

def test_negative_cycle_detected_unidirectional(negative_cycle_graph):
    mode = CommunicationMode(direction=Direction.UNIDIRECTIONAL)
    with pytest.raises(NegativeCycleError):
        virtual_source_bellman_ford(negative_cycle_graph, mode=mode)

def test_virtual_source_rounds_bounded(diamond_graph):
    result = virtual_source_bellman_ford(diamond_graph)
    assert result.metrics.rounds <= diamond_graph.node_count
