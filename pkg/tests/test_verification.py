import numpy as np
import pytest

from app.config import settings
from app.core.engine import CommunicationMode
from app.core.exceptions import DimensionMismatchError
from app.core.graph import Graph, generate_random_graph
from app.core.randomness import RandomStreams, StreamPurpose
from app.services.apsp_service import ApspConfig, run_apsp
from app.services.bellman_ford_service import distributed_bellman_ford
from app.services.oracle_service import canonical_path, hop_matrix, oracle_apsp
from app.services.verification_service import las_vegas_verify, tables_to_matrix
from app.utils.constants import Direction, Verdict

def relaxable_pairs(graph, dist):
    """(s, v, x) with x the predecessor of v on a canonical s -> v path"""
    exact, hops = hop_matrix(graph)
    pairs = []
    for s in range(graph.node_count):
        for v in range(graph.node_count):
            if s != v and np.isfinite(dist[s, v]):
                path = canonical_path(graph, s, v, exact, hops)
                pairs.append((s, v, path[-2]))
    return pairs

@pytest.mark.parametrize("seed", range(4))
def test_correct_tables_are_consistent(random_graph, seed):
    g = random_graph(16, p=0.2, seed=seed)
    result = las_vegas_verify(g, oracle_apsp(g))
    assert result.verdict == Verdict.CONSISTENT
    assert result.consistent
    assert result.violating_nodes == []
    assert result.metrics.rounds <= settings.VERIFY_CONSTANT * g.node_count

@pytest.mark.parametrize("seed", range(4))
def test_inflated_entry_is_caught(random_graph, seed):
    g = random_graph(16, p=0.2, seed=seed)
    dist = oracle_apsp(g)
    pairs = relaxable_pairs(g, dist)
    s, v, x = pairs[RandomStreams(seed).generator(StreamPurpose.FAULTS).integers(len(pairs))]
    faulty = dist.copy()
    faulty[s, v] += 1

    result = las_vegas_verify(g, faulty)
    assert result.verdict == Verdict.VIOLATION
    assert result.violating_nodes == [v]
    assert (v, s, x) in result.violations
    assert v in result.alarmed_nodes
    assert result.metrics.rounds <= settings.VERIFY_CONSTANT * g.node_count

def test_alarm_floods_the_component(path_graph):
    dist = oracle_apsp(path_graph)
    dist[0, 5] += 1
    result = las_vegas_verify(path_graph, dist)
    assert result.violating_nodes == [5]
    assert result.alarmed_nodes == list(range(6))

def test_underestimates_pass_unnoticed(diamond_graph):
    # node 4 has no outgoing arcs, so nobody can relax through it
    dist = oracle_apsp(diamond_graph)
    dist[0, 4] -= 1
    assert las_vegas_verify(diamond_graph, dist).consistent

def test_unidirectional_checks_along_arcs(diamond_graph):
    dist = oracle_apsp(diamond_graph)
    dist[0, 3] += 1
    mode = CommunicationMode(direction=Direction.UNIDIRECTIONAL)
    assert las_vegas_verify(diamond_graph, dist, mode=mode).violating_nodes == [3]

def test_accepts_distance_tables(random_graph):
    g = random_graph(10, p=0.3, seed=3)
    bf = distributed_bellman_ford(g, range(10), h=10)
    assert np.array_equal(tables_to_matrix(bf.tables, 10), oracle_apsp(g))
    assert las_vegas_verify(g, bf.tables).consistent

def test_shape_mismatch():
    with pytest.raises(DimensionMismatchError):
        las_vegas_verify(Graph(3, [(0, 1, 1.0)]), np.zeros((2, 2)))

@pytest.mark.slow
def test_verdicts_at_acceptance_size():
    n = 64
    for seed in range(20):
        g = generate_random_graph(n, 0.08, 0, 100, seed=seed, integer_weights=True)
        dist = run_apsp(g, ApspConfig(seed=seed, check_preconditions=False)).distances
        clean = las_vegas_verify(g, dist, seed=seed)
        assert clean.verdict == Verdict.CONSISTENT, f"seed {seed}"
        assert clean.metrics.rounds <= settings.VERIFY_CONSTANT * n

        pairs = relaxable_pairs(g, dist)
        s, v, _ = pairs[RandomStreams(seed).generator(StreamPurpose.FAULTS).integers(len(pairs))]
        faulty = dist.copy()
        faulty[s, v] += 1
        caught = las_vegas_verify(g, faulty, seed=seed)
        assert caught.verdict == Verdict.VIOLATION, f"seed {seed}"
        assert v in caught.violating_nodes
        assert caught.metrics.rounds <= settings.VERIFY_CONSTANT * n
