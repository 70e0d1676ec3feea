"""
Distributed Bellman-Ford.

Hop-bounded multi-source relaxation runs one scheduler instance per
source. Messages carry a hop counter and a node forwards a label only
while its hop count is below h, so scheduler delays cannot inflate the
effective depth.

Virtual-source mode (used by Johnson reweighting) runs synchronously on
the engine: every node starts at 0, emissions stop after round n, and a
strict decrease in round n+1 flags a negative cycle.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional

from app.core.engine import (
    CommunicationMode,
    NodeProgram,
    ProtocolMessage,
    RunMetrics,
    TranscriptEntry,
    run_simulation,
)
from app.core.exceptions import InvalidParameterError, NegativeCycleError, NegativeWeightError
from app.core.graph import Graph
from app.services.oracle_service import canonical_cycle, find_negative_cycle
from app.services.scheduler_service import (
    InstanceDescriptor,
    InstanceProgram,
    ScheduledInstance,
    schedule_parallel,
)
from app.utils.constants import VIRTUAL_SOURCE, InstanceKind, MessageKind
from app.utils.helpers import INF

logger = logging.getLogger(__name__)

@dataclass
class DistanceTable:
    """d^v(label, v) as known at the owner; entries only decrease"""
    owner: int
    entries: Dict[int, float] = field(default_factory=dict)

    def get(self, label: int) -> float:
        return self.entries.get(label, INF)

    def relax(self, label: int, value: float) -> bool:
        if value < self.get(label):
            self.entries[label] = value
            return True
        return False

    def __contains__(self, label: int) -> bool:
        return label in self.entries

@dataclass
class BellmanFordResult:
    tables: List[DistanceTable]
    hops: List[Dict[int, float]]
    metrics: RunMetrics
    transcript: Optional[List[TranscriptEntry]] = None

# ==========================================
# HOP-BOUNDED MULTI-SOURCE
# ==========================================

class BellmanFordInstance(InstanceProgram):
    """One source's relaxation at one node, lexicographic on (estimate, hops)"""

    def __init__(self, source: int, hop_limit: int):
        super().__init__(instance_id=source)
        self.source = source
        self.hop_limit = hop_limit
        self.estimate = INF
        self.hops = INF
        self.parent: Optional[int] = None

    def on_activate(self, round_: int) -> None:
        if self.node_id == self.source:
            self.estimate, self.hops = 0.0, 0
            self.request_emit()

    def on_receive(self, message: ProtocolMessage, sender: int) -> None:
        if message.kind != MessageKind.BF_RELAX or message.source != self.source:
            return
        weight = self.ctx.in_weights.get(sender)
        if weight is None:
            return
        candidate = (message.value + weight, message.hops + 1)
        if candidate < (self.estimate, self.hops):
            self.estimate, self.hops = candidate
            self.parent = sender
            self.request_emit()

    def decide(self, round_: int) -> Optional[ProtocolMessage]:
        if self.hops >= self.hop_limit:
            return None
        return ProtocolMessage(
            kind=MessageKind.BF_RELAX,
            source=self.source,
            value=self.estimate,
            hops=int(self.hops),
            instance=self.instance_id,
        )

def bellman_ford_instances(graph: Graph, sources: Iterable[int], h: int) -> List[ScheduledInstance]:
    return [
        ScheduledInstance(
            descriptor=InstanceDescriptor(
                instance_id=s,
                kind=InstanceKind.BF,
                dilation=min(h, graph.node_count),
                congestion=1.0,
            ),
            factory=lambda node, s=s: BellmanFordInstance(s, h),
        )
        for s in sorted(set(sources))
    ]

def distributed_bellman_ford(
    graph: Graph,
    sources: Iterable[int],
    h: int,
    mode: CommunicationMode = CommunicationMode(),
    seed: int = 0,
    delay_bound: Optional[int] = None,
    round_limit: Optional[int] = None,
    record_transcript: bool = False,
) -> BellmanFordResult:
    """h-hop-accurate estimates d^t(s, t) for every source s and node t"""
    if h < 1:
        raise InvalidParameterError(f"h must be a positive integer, got {h}")
    sources = sorted(set(sources))
    for s in sources:
        if not 0 <= s < graph.node_count:
            raise InvalidParameterError(f"source {s} is not a node")
    for u, v, w in graph.edges:
        if w < 0:
            raise NegativeWeightError((u, v))

    tables = [DistanceTable(owner=v) for v in range(graph.node_count)]
    hops: List[Dict[int, float]] = [dict() for _ in range(graph.node_count)]
    if not sources:
        return BellmanFordResult(tables, hops, RunMetrics())

    schedule = schedule_parallel(
        graph,
        bellman_ford_instances(graph, sources, h),
        mode=mode,
        seed=seed,
        delay_bound=delay_bound,
        round_limit=round_limit,
        record_transcript=record_transcript,
    )
    for s in sources:
        for v, program in enumerate(schedule.programs[s]):
            if math.isfinite(program.estimate):
                tables[v].entries[s] = program.estimate
                hops[v][s] = program.hops

    logger.info(
        f"🔁 Bellman-Ford: {len(sources)} sources, h={h}, rounds={schedule.metrics.rounds}, "
        f"max_node_congestion={schedule.metrics.max_node_congestion}"
    )
    return BellmanFordResult(tables, hops, schedule.metrics, schedule.transcript)

# ==========================================
# VIRTUAL SOURCE (JOHNSON)
# ==========================================

class VirtualSourceNode(NodeProgram):
    """dist(s*, v) where s* reaches every node through a zero-weight arc"""

    def __init__(self):
        super().__init__()
        self.estimate = 0.0
        self.parent: Optional[int] = None
        self.flagged = False
        self._pending = True

    def on_receive(self, message: ProtocolMessage, sender: int) -> None:
        weight = self.ctx.in_weights.get(sender)
        if weight is None:
            return
        candidate = message.value + weight
        if candidate < self.estimate:
            self.estimate = candidate
            self.parent = sender
            self._pending = True
            if self.ctx.round > self.ctx.n:
                self.flagged = True

    def emit(self) -> Optional[ProtocolMessage]:
        if not self._pending or self.ctx.round > self.ctx.n:
            return None
        self._pending = False
        return ProtocolMessage(kind=MessageKind.BF_RELAX, source=VIRTUAL_SOURCE, value=self.estimate)

    def is_done(self) -> bool:
        return not self._pending or self.ctx.round > self.ctx.n

@dataclass
class PotentialsResult:
    potentials: List[float]
    parents: List[Optional[int]]
    metrics: RunMetrics
    transcript: Optional[List[TranscriptEntry]] = None

def _cycle_from_parents(graph: Graph, parents: List[Optional[int]], witness: int) -> Optional[List[int]]:
    node = witness
    for _ in range(graph.node_count):
        node = parents[node]
        if node is None:
            return None
    cycle = [node]
    walker = parents[node]
    while walker != node:
        if walker is None or len(cycle) > graph.node_count:
            return None
        cycle.append(walker)
        walker = parents[walker]
    cycle.reverse()
    weight = sum(graph.out_adj[cycle[i]].get(cycle[(i + 1) % len(cycle)], INF) for i in range(len(cycle)))
    if not weight < 0:
        return None
    return canonical_cycle(cycle)

def virtual_source_bellman_ford(
    graph: Graph,
    mode: CommunicationMode = CommunicationMode(),
    seed: int = 0,
    round_limit: Optional[int] = None,
    record_transcript: bool = False,
) -> PotentialsResult:
    """φ(v) = dist(s*, v); raises NegativeCycleError with a witness"""
    programs = [VirtualSourceNode() for _ in range(graph.node_count)]
    result = run_simulation(graph, programs, mode=mode, seed=seed, round_limit=round_limit, record_transcript=record_transcript)

    flagged = [v for v, p in enumerate(programs) if p.flagged]
    parents = [p.parent for p in programs]
    if flagged:
        witness = flagged[0]
        cycle = _cycle_from_parents(graph, parents, witness) or find_negative_cycle(graph) or []
        logger.warning(f"⚠️  Negative cycle detected at node {witness}: {cycle}")
        raise NegativeCycleError(cycle, witness=witness)

    logger.debug(f"🧭 Potentials computed in {result.metrics.rounds} rounds")
    return PotentialsResult([p.estimate for p in programs], parents, result.metrics, result.transcript)
