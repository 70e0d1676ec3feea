"""
Grafo dirigido ponderado: representación, E/S en formato de lista de
aristas y generación aleatoria reproducible.

Formato de archivo (UTF-8):
    <n> <m> <directed|undirected>
    <tail> <head> <weight>      (m líneas)
Los comentarios empiezan con '#'.
"""
import io
import logging
import math
from typing import Dict, Iterable, List, Optional, Sequence, TextIO, Tuple, Union

import numpy as np

from app.core.exceptions import GraphParseError, InvalidParameterError, NodeIdOutOfRangeError
from app.core.randomness import RandomStreams, StreamPurpose
from app.utils.constants import Direction
from app.utils.helpers import INF, format_value

logger = logging.getLogger(__name__)

Edge = Tuple[int, int, float]

class Graph:
    """
    Topología de la red e instancia de caminos mínimos.

    Los ids de nodo son exactamente 0..node_count-1. No hay bucles; las
    aristas paralelas se colapsan al peso mínimo. En grafos no dirigidos
    cada arista se guarda una vez con tail < head y las vistas de arcos
    contienen ambas direcciones.
    """

    def __init__(self, node_count: int, edges: Iterable[Sequence], directed: bool = True):
        if int(node_count) < 1:
            raise InvalidParameterError(f"node_count must be positive, got {node_count}")
        self.node_count = int(node_count)
        self.directed = bool(directed)

        collapsed: Dict[Tuple[int, int], float] = {}
        for edge in edges:
            tail, head, weight = int(edge[0]), int(edge[1]), float(edge[2])
            for node in (tail, head):
                if not 0 <= node < self.node_count:
                    raise NodeIdOutOfRangeError(node, self.node_count)
            if tail == head:
                raise InvalidParameterError(f"self-loop on node {tail}")
            if not math.isfinite(weight):
                raise InvalidParameterError(f"edge ({tail}, {head}) has non-finite weight {weight}")
            key = (tail, head) if self.directed else (min(tail, head), max(tail, head))
            if key not in collapsed or weight < collapsed[key]:
                collapsed[key] = weight

        self.edges: Tuple[Edge, ...] = tuple((u, v, w) for (u, v), w in sorted(collapsed.items()))

        self.out_adj: List[Dict[int, float]] = [dict() for _ in range(self.node_count)]
        self.in_adj: List[Dict[int, float]] = [dict() for _ in range(self.node_count)]
        for tail, head, weight in self.arcs:
            self.out_adj[tail][head] = weight
            self.in_adj[head][tail] = weight

    # ==========================================
    # VISTAS
    # ==========================================

    @property
    def n(self) -> int:
        return self.node_count

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def arcs(self) -> List[Edge]:
        """Arcos dirigidos (ambos sentidos en grafos no dirigidos), ordenados"""
        if self.directed:
            return list(self.edges)
        both = [(u, v, w) for u, v, w in self.edges] + [(v, u, w) for u, v, w in self.edges]
        return sorted(both)

    @property
    def has_negative_weights(self) -> bool:
        return any(w < 0 for _, _, w in self.edges)

    def weight(self, tail: int, head: int) -> Optional[float]:
        return self.out_adj[tail].get(head)

    def weight_matrix(self) -> np.ndarray:
        """Matriz n×n: peso del arco, ∞ sin arco, 0 en la diagonal"""
        matrix = np.full((self.node_count, self.node_count), INF)
        for tail, head, weight in self.arcs:
            matrix[tail, head] = weight
        np.fill_diagonal(matrix, 0.0)
        return matrix

    def comm_neighbors(self, node: int, direction: Direction) -> Tuple[int, ...]:
        """Nodos que reciben lo que emite `node` bajo el modo de dirección"""
        if direction == Direction.UNIDIRECTIONAL:
            return tuple(sorted(self.out_adj[node]))
        return tuple(sorted(set(self.out_adj[node]) | set(self.in_adj[node])))

    def comm_senders(self, node: int, direction: Direction) -> Tuple[int, ...]:
        """Nodos que `node` puede escuchar"""
        if direction == Direction.UNIDIRECTIONAL:
            return tuple(sorted(self.in_adj[node]))
        return self.comm_neighbors(node, direction)

    def with_weights(self, edges: Iterable[Edge]) -> "Graph":
        return Graph(self.node_count, edges, directed=self.directed)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.node_count, self.directed, self.edges) == (other.node_count, other.directed, other.edges)

    def __repr__(self) -> str:
        kind = "directed" if self.directed else "undirected"
        return f"Graph(n={self.node_count}, m={self.edge_count}, {kind})"

# ==========================================
# E/S
# ==========================================

def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0].strip()

def _parse_node(token: str, node_count: int, line_no: int) -> int:
    try:
        node = int(token)
    except ValueError:
        raise GraphParseError(f"node id '{token}' is not an integer", line=line_no)
    if not 0 <= node < node_count:
        raise NodeIdOutOfRangeError(node, node_count, line=line_no)
    return node

def load_graph(text: Union[str, TextIO]) -> Graph:
    """Parsear el formato de lista de aristas"""
    stream = io.StringIO(text) if isinstance(text, str) else text

    header: Optional[Tuple[int, int, bool]] = None
    edges: List[Edge] = []

    for line_no, raw in enumerate(stream, start=1):
        line = _strip_comment(raw)
        if not line:
            continue
        tokens = line.split()

        if header is None:
            if len(tokens) != 3:
                raise GraphParseError("header must be '<n> <m> <directed|undirected>'", line=line_no)
            try:
                node_count, edge_count = int(tokens[0]), int(tokens[1])
            except ValueError:
                raise GraphParseError("header counts must be integers", line=line_no)
            if tokens[2] not in ("directed", "undirected"):
                raise GraphParseError(f"unknown graph kind '{tokens[2]}'", line=line_no)
            if node_count < 1 or edge_count < 0:
                raise GraphParseError("header requires n >= 1 and m >= 0", line=line_no)
            header = (node_count, edge_count, tokens[2] == "directed")
            continue

        if len(tokens) == 3 and tokens[2] in ("directed", "undirected"):
            raise GraphParseError("duplicate header", line=line_no)
        if len(tokens) != 3:
            raise GraphParseError("edge line must be '<tail> <head> <weight>'", line=line_no)

        node_count = header[0]
        tail = _parse_node(tokens[0], node_count, line_no)
        head = _parse_node(tokens[1], node_count, line_no)
        try:
            weight = float(tokens[2])
        except ValueError:
            raise GraphParseError(f"weight '{tokens[2]}' is not numeric", line=line_no)
        if not math.isfinite(weight):
            raise GraphParseError(f"weight '{tokens[2]}' is not finite", line=line_no)
        if tail == head:
            raise GraphParseError(f"self-loop on node {tail}", line=line_no)
        edges.append((tail, head, weight))

    if header is None:
        raise GraphParseError("missing header")
    node_count, edge_count, directed = header
    if len(edges) != edge_count:
        raise GraphParseError(f"header declares {edge_count} edges but {len(edges)} were given")

    graph = Graph(node_count, edges, directed=directed)
    logger.debug(f"📥 Loaded {graph}")
    return graph

def dump_graph(graph: Graph) -> str:
    """Serializar al formato de lista de aristas"""
    kind = "directed" if graph.directed else "undirected"
    lines = [f"{graph.node_count} {graph.edge_count} {kind}"]
    lines.extend(f"{u} {v} {format_value(w)}" for u, v, w in graph.edges)
    return "\n".join(lines) + "\n"

# ==========================================
# GENERACIÓN
# ==========================================

def generate_random_graph(
    n: int,
    edge_probability: float,
    weight_low: float,
    weight_high: float,
    seed: int,
    directed: bool = True,
    integer_weights: bool = False,
    zero_weight_fraction: float = 0.0,
) -> Graph:
    """
    Cada par (u, v), u ≠ v, lleva una arista independiente con
    probabilidad edge_probability; pesos uniformes en [low, high].
    Mismos argumentos, mismo grafo.
    """
    if n < 1:
        raise InvalidParameterError(f"n must be positive, got {n}")
    if not 0.0 < edge_probability <= 1.0:
        raise InvalidParameterError(f"edge_probability must lie in (0, 1], got {edge_probability}")
    if weight_low > weight_high:
        raise InvalidParameterError(f"weight_low {weight_low} exceeds weight_high {weight_high}")
    if not 0.0 <= zero_weight_fraction <= 1.0:
        raise InvalidParameterError(f"zero_weight_fraction must lie in [0, 1], got {zero_weight_fraction}")

    rng = RandomStreams(seed).generator(StreamPurpose.GRAPH)

    present = rng.random((n, n)) < edge_probability
    np.fill_diagonal(present, False)
    if not directed:
        present = np.triu(present, k=1)
    tails, heads = np.nonzero(present)

    if integer_weights:
        low, high = math.ceil(weight_low), math.floor(weight_high)
        if low > high:
            raise InvalidParameterError(f"no integer lies in [{weight_low}, {weight_high}]")
        weights = rng.integers(low, high + 1, size=tails.size).astype(float)
    else:
        weights = rng.uniform(weight_low, weight_high, size=tails.size)

    if zero_weight_fraction > 0:
        weights[rng.random(tails.size) < zero_weight_fraction] = 0.0

    graph = Graph(n, zip(tails.tolist(), heads.tolist(), weights.tolist()), directed=directed)
    logger.debug(f"🎲 Generated {graph} (p={edge_probability}, seed={seed})")
    return graph
