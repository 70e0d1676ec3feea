import io

import pytest

from app.core.exceptions import GraphParseError, InvalidParameterError, NodeIdOutOfRangeError
from app.core.graph import Graph, dump_graph, generate_random_graph, load_graph
from app.utils.constants import Direction

# ==========================================
# MODELO
# ==========================================

def test_parallel_edges_collapse_to_min():
    g = Graph(3, [(0, 1, 5.0), (0, 1, 2.0), (1, 2, 1.0)])
    assert g.edges == ((0, 1, 2.0), (1, 2, 1.0))
    assert g.weight(0, 1) == 2.0
    assert g.weight(1, 0) is None

def test_undirected_edges_stored_once_with_both_arcs():
    g = Graph(3, [(2, 0, 4.0), (0, 2, 3.0)], directed=False)
    assert g.edges == ((0, 2, 3.0),)
    assert g.arcs == [(0, 2, 3.0), (2, 0, 3.0)]
    assert g.in_adj[0] == {2: 3.0}

def test_self_loop_rejected():
    with pytest.raises(InvalidParameterError):
        Graph(2, [(1, 1, 1.0)])

def test_out_of_range_node_rejected():
    with pytest.raises(NodeIdOutOfRangeError):
        Graph(2, [(0, 2, 1.0)])

def test_communication_neighbors():
    g = Graph(3, [(0, 1, 1.0), (2, 0, 1.0)])
    assert g.comm_neighbors(0, Direction.UNIDIRECTIONAL) == (1,)
    assert g.comm_neighbors(0, Direction.BIDIRECTIONAL) == (1, 2)
    assert g.comm_senders(0, Direction.UNIDIRECTIONAL) == (2,)

def test_weight_matrix(diamond_graph):
    w = diamond_graph.weight_matrix()
    assert w[0, 0] == 0.0
    assert w[0, 3] == 4.0
    assert w[3, 0] == float("inf")

def test_negative_weight_flag():
    assert Graph(2, [(0, 1, -1.0)]).has_negative_weights
    assert not Graph(2, [(0, 1, 0.0)]).has_negative_weights

# ==========================================
# E/S
# ==========================================

def test_load_and_dump_round_trip(diamond_graph):
    text = dump_graph(diamond_graph)
    assert text.splitlines()[0] == "5 6 directed"
    assert load_graph(text) == diamond_graph
    assert load_graph(io.StringIO(text)) == diamond_graph

def test_comments_and_blank_lines():
    g = load_graph("# a comment\n3 2 undirected\n\n0 1 1.5  # trailing\n1 2 2\n")
    assert not g.directed
    assert g.edges == ((0, 1, 1.5), (1, 2, 2.0))

def test_single_node_no_edges():
    g = load_graph("1 0 directed\n")
    assert g.node_count == 1 and g.edge_count == 0

@pytest.mark.parametrize("text,line", [
    ("3 1 directed\n3 1 directed\n", 2),
    ("3 1 directed\n0 x 1\n", 2),
    ("3 1 directed\n0 1 abc\n", 2),
    ("3 1 directed\n0 1 inf\n", 2),
    ("3 1 directed\n0 1 nan\n", 2),
    ("3 1 directed\n1 1 1\n", 2),
    ("3 1 directed\n0 1\n", 2),
    ("3 1 sideways\n", 1),
])
def test_parse_errors_report_line(text, line):
    with pytest.raises(GraphParseError) as exc:
        load_graph(text)
    assert exc.value.line == line

def test_out_of_range_id_in_file():
    with pytest.raises(NodeIdOutOfRangeError) as exc:
        load_graph("2 1 directed\n# edge\n0 5 1\n")
    assert exc.value.line == 3
    assert exc.value.node == 5

def test_edge_count_mismatch():
    with pytest.raises(GraphParseError):
        load_graph("3 2 directed\n0 1 1\n")

def test_missing_header():
    with pytest.raises(GraphParseError):
        load_graph("# nothing\n")

# ==========================================
# GENERACIÓN
# ==========================================

def test_generator_is_deterministic():
    a = generate_random_graph(20, 0.3, 0, 10, seed=5)
    b = generate_random_graph(20, 0.3, 0, 10, seed=5)
    c = generate_random_graph(20, 0.3, 0, 10, seed=6)
    assert a == b
    assert a != c

def test_complete_graphs():
    directed = generate_random_graph(6, 1.0, 1, 2, seed=0)
    undirected = generate_random_graph(6, 1.0, 1, 2, seed=0, directed=False)
    assert directed.edge_count == 30
    assert undirected.edge_count == 15
    assert all(u < v for u, v, _ in undirected.edges)

def test_integer_weights_in_range():
    g = generate_random_graph(15, 0.5, -3, 7, seed=2, integer_weights=True)
    assert all(float(w).is_integer() and -3 <= w <= 7 for _, _, w in g.edges)

def test_real_weights_in_range():
    g = generate_random_graph(15, 0.5, 1.5, 2.5, seed=2)
    assert all(1.5 <= w <= 2.5 for _, _, w in g.edges)

def test_zero_weight_fraction():
    g = generate_random_graph(10, 1.0, 5, 9, seed=1, integer_weights=True, zero_weight_fraction=1.0)
    assert all(w == 0.0 for _, _, w in g.edges)

@pytest.mark.parametrize("kwargs", [
    dict(n=0, edge_probability=0.5, weight_low=0, weight_high=1),
    dict(n=5, edge_probability=0.0, weight_low=0, weight_high=1),
    dict(n=5, edge_probability=1.5, weight_low=0, weight_high=1),
    dict(n=5, edge_probability=0.5, weight_low=2, weight_high=1),
])
def test_generator_rejects_bad_parameters(kwargs):
    with pytest.raises(InvalidParameterError):
        generate_random_graph(seed=0, **kwargs)

def test_single_node_generation():
    g = generate_random_graph(1, 0.5, 0, 1, seed=0)
    assert g.node_count == 1 and g.edge_count == 0
