"""
Centralized brute-force oracles.

Independent of the distributed protocols: every function here is a pure
function of its inputs and reads the whole graph at once.
"""
import logging
from collections import deque
from typing import Iterable, List, Mapping, Optional, Tuple

import numpy as np

from app.core.exceptions import InvalidParameterError, NegativeCycleError, NegativeWeightError
from app.core.graph import Graph
from app.utils.constants import Direction
from app.utils.helpers import INF

logger = logging.getLogger(__name__)

def canonical_cycle(cycle: List[int]) -> List[int]:
    """Rotate an open cycle to start at its smallest node and close it"""
    if not cycle:
        return []
    start = cycle.index(min(cycle))
    rotated = cycle[start:] + cycle[:start]
    return rotated + [rotated[0]]

def find_negative_cycle(graph: Graph) -> Optional[List[int]]:
    """
    Bellman-Ford from a virtual source joined to every node by a
    zero-weight arc. Returns a closed witness cycle or None.
    """
    n = graph.node_count
    dist = [0.0] * n
    pred = [-1] * n
    arcs = graph.arcs

    last_relaxed = -1
    for _ in range(n):
        last_relaxed = -1
        for u, v, w in arcs:
            if dist[u] + w < dist[v]:
                dist[v] = dist[u] + w
                pred[v] = u
                last_relaxed = v
        if last_relaxed == -1:
            return None

    # n steps back along pred always land inside the cycle
    node = last_relaxed
    for _ in range(n):
        node = pred[node]

    cycle = [node]
    walker = pred[node]
    while walker != node:
        cycle.append(walker)
        walker = pred[walker]
    cycle.reverse()
    return canonical_cycle(cycle)

def oracle_apsp(graph: Graph) -> np.ndarray:
    """
    Floyd–Warshall. Entry (u, v) is dist(u, v); ∞ when v is unreachable.

    Raises NegativeCycleError carrying one witness cycle.
    """
    dist = graph.weight_matrix()
    for k in range(graph.node_count):
        np.minimum(dist, dist[:, k:k + 1] + dist[k:k + 1, :], out=dist)
        if dist[k, k] < 0:
            break
    if np.any(np.diag(dist) < 0):
        cycle = find_negative_cycle(graph)
        raise NegativeCycleError(cycle or [])
    return dist

def hop_matrix(graph: Graph) -> Tuple[np.ndarray, np.ndarray]:
    """
    (dist, hop) where hop(u, v) is the edge count of a minimum-weight,
    then minimum-edge-count path; ∞ iff dist is ∞.
    """
    dist = graph.weight_matrix()
    hops = np.where(np.isfinite(dist), 1.0, INF)
    np.fill_diagonal(hops, 0.0)

    for k in range(graph.node_count):
        cand_dist = dist[:, k:k + 1] + dist[k:k + 1, :]
        cand_hops = hops[:, k:k + 1] + hops[k:k + 1, :]
        better = (cand_dist < dist) | ((cand_dist == dist) & (cand_hops < hops))
        dist = np.where(better, cand_dist, dist)
        hops = np.where(better, cand_hops, hops)
        if dist[k, k] < 0:
            raise NegativeCycleError(find_negative_cycle(graph) or [])
    return dist, hops

def canonical_path(
    graph: Graph,
    source: int,
    target: int,
    dist: Optional[np.ndarray] = None,
    hops: Optional[np.ndarray] = None,
) -> Optional[List[int]]:
    """
    Minimum weight, then fewest edges, then lexicographically smallest
    node sequence. None when target is unreachable.
    """
    if dist is None or hops is None:
        dist, hops = hop_matrix(graph)
    if not np.isfinite(dist[source, target]):
        return None

    path = [source]
    current = source
    while current != target:
        for nxt in sorted(graph.out_adj[current]):
            weight = graph.out_adj[current][nxt]
            if weight + dist[nxt, target] == dist[current, target] and 1 + hops[nxt, target] == hops[current, target]:
                path.append(nxt)
                current = nxt
                break
        else:
            raise RuntimeError(f"inconsistent oracle data reconstructing {source}->{target}")
    return path

def oracle_hop_bounded(graph: Graph, h: int) -> np.ndarray:
    """Entry (u, v) = minimum weight over paths with at most h edges"""
    if h < 0:
        raise InvalidParameterError(f"h must be non-negative, got {h}")
    for u, v, w in graph.edges:
        if w < 0:
            raise NegativeWeightError((u, v))

    n = graph.node_count
    weights = graph.weight_matrix()
    dist = np.full((n, n), INF)
    np.fill_diagonal(dist, 0.0)

    for _ in range(min(h, n - 1)):
        extended = dist.copy()
        for k in range(n):
            np.minimum(extended, dist[:, k:k + 1] + weights[k:k + 1, :], out=extended)
        if np.array_equal(extended, dist):
            break
        dist = extended
    return dist

def dist_through_oracle(dhat: Mapping[int, float], dist: np.ndarray, between: Iterable[int]) -> np.ndarray:
    """output(v) = min over b in B of dhat(b) + dist(b, v); ∞ for empty B"""
    n = dist.shape[0]
    output = np.full(n, INF)
    for b in between:
        np.minimum(output, dhat.get(b, INF) + dist[b, :], out=output)
    return output

def bfs_eccentricity(graph: Graph, source: int, direction: Direction = Direction.BIDIRECTIONAL) -> int:
    """Largest hop distance from source over the nodes it reaches"""
    depth = {source: 0}
    frontier = deque([source])
    while frontier:
        node = frontier.popleft()
        for nxt in graph.comm_neighbors(node, direction):
            if nxt not in depth:
                depth[nxt] = depth[node] + 1
                frontier.append(nxt)
    return max(depth.values())

def undirected_diameter(graph: Graph) -> int:
    """Hop diameter ignoring directions; requires a connected graph"""
    return max(bfs_eccentricity(graph, v, Direction.BIDIRECTIONAL) for v in range(graph.node_count))
