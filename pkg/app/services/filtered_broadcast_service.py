"""
Random Filtered Broadcast.

Computes, at every node v, output^v = min over b in B of dhat(b) + dist(b, v)
with O(log² n) emissions per node. Between-nodes are sampled into nested
levels B_0 ⊇ B_1 ⊇ … ⊇ B_{L+1} = ∅ (L = ⌈log₂ n⌉) from their own coins.
Iterations run from j = L down to 0: members of B_j offer M(s, b) and
every node forwards the best offer it has seen only when it strictly
improves its output.

Two iteration-boundary policies:
    FIXED      synchronized windows of `window` rounds measured from the
               instance start; after the last window nodes only drain
               improvements still queued
    QUIESCENT  iteration j starts once iteration j+1 has nothing queued
               or in flight (detected by the scheduler)
"""
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Set, Tuple, Union

import numpy as np

from app.config import settings
from app.core.engine import CommunicationMode, ProtocolMessage, RunMetrics, TranscriptEntry
from app.core.exceptions import InvalidParameterError, PreconditionViolationError
from app.core.graph import Graph
from app.core.randomness import RandomStreams, StreamPurpose
from app.services.oracle_service import oracle_apsp
from app.services.scheduler_service import (
    InstanceCoordinator,
    InstanceDescriptor,
    InstanceProgram,
    ScheduleController,
    ScheduledInstance,
    schedule_parallel,
)
from app.utils.constants import NO_NODE, InstanceKind, IterationPolicy, MessageKind
from app.utils.helpers import INF, ceil_log2

logger = logging.getLogger(__name__)

DistTables = Union[np.ndarray, Sequence[Mapping[int, float]]]

# ==========================================
# HIERARCHY
# ==========================================

@dataclass(frozen=True)
class BetweenHierarchy:
    """levels[j] = B_j for j = 0..L+1; the last level is empty"""
    levels: Tuple[FrozenSet[int], ...]
    top: Mapping[int, int]

    @property
    def depth(self) -> int:
        return len(self.levels) - 2

    def members(self, j: int) -> FrozenSet[int]:
        if 0 <= j < len(self.levels):
            return self.levels[j]
        return frozenset()

def between_top_level(seed: int, b: int, depth: int) -> int:
    """Highest level containing b; b's own coins, no communication"""
    rng = RandomStreams(seed).generator(StreamPurpose.BETWEEN, b)
    return min(depth, int(rng.geometric(0.5)) - 1)

def sample_between_hierarchy(between: Iterable[int], n: int, seed: int) -> BetweenHierarchy:
    between = sorted(set(between))
    for b in between:
        if not 0 <= b < n:
            raise InvalidParameterError(f"between-node {b} is not a node")
    depth = ceil_log2(n)
    top = {b: between_top_level(seed, b, depth) for b in between}
    levels = tuple(frozenset(b for b in between if top[b] >= j) for j in range(depth + 1)) + (frozenset(),)
    return BetweenHierarchy(levels=levels, top=top)

# ==========================================
# NODE STATE AND THE FILTER RULE
# ==========================================

@dataclass
class FilterState:
    owner: int
    dist_from_between: Mapping[int, float]
    output: float = INF
    seen: Set[int] = field(default_factory=set)
    best_between: int = NO_NODE
    history: List[Tuple[int, float]] = field(default_factory=list)
    boundary: Dict[int, float] = field(default_factory=dict)

    def offer_value(self, message: ProtocolMessage) -> float:
        return message.value + self.dist_from_between.get(message.between, INF)

class FilterDecision(NamedTuple):
    message: Optional[ProtocolMessage]
    output: float
    best_between: int

def filter_decision(state: FilterState, candidates: Iterable[ProtocolMessage]) -> FilterDecision:
    """
    Pick b* minimizing dhat(b) + dist(b, v), ties to the lowest b; forward
    M(s, b*) only on strict improvement over the current output.
    """
    best: Optional[ProtocolMessage] = None
    best_key: Optional[Tuple[float, int]] = None
    for message in candidates:
        key = (state.offer_value(message), message.between)
        if best_key is None or key < best_key:
            best, best_key = message, key
    if best is not None and best_key[0] < state.output:
        return FilterDecision(best, best_key[0], best.between)
    return FilterDecision(None, state.output, state.best_between)

# ==========================================
# PER-NODE PROGRAM
# ==========================================

class FilteredBroadcastInstance(InstanceProgram):

    def __init__(
        self,
        instance_id: int,
        source: int,
        owner: int,
        top_level: Optional[int],
        dhat: float,
        dist_from_between: Mapping[int, float],
        depth: int,
        policy: IterationPolicy,
        window: int,
    ):
        super().__init__(instance_id)
        self.source = source
        self.top_level = top_level
        self.dhat = dhat
        self.depth = depth
        self.policy = policy
        self.window = window
        self.state = FilterState(owner=owner, dist_from_between=dist_from_between)
        self.emissions: Counter = Counter()
        self.emitted_outputs: List[float] = []
        self._inbox: List[ProtocolMessage] = []
        self._pending_start: Optional[int] = None
        self._pending_boundaries: List[int] = []

    def on_activate(self, round_: int) -> None:
        self._pending_start = self.depth
        self.request_emit()
        if self.policy == IterationPolicy.FIXED:
            for t in range(1, self.depth + 2):
                self.wake_at(round_ + t * self.window, tag=t)

    def on_wake(self, round_: int, tag) -> None:
        if self.policy == IterationPolicy.FIXED:
            self._pending_boundaries.append(self.depth - tag + 1)
            if tag <= self.depth:
                self._pending_start = self.depth - tag
        else:
            self._pending_start = int(tag)
        self.request_emit()

    def on_receive(self, message: ProtocolMessage, sender: int) -> None:
        if message.kind != MessageKind.FB_OFFER or message.source != self.source:
            return
        self._inbox.append(message)
        self.request_emit()

    def _improve(self, round_: int, output: float, best_between: int) -> None:
        self.state.output = output
        self.state.best_between = best_between
        self.state.history.append((round_, output))

    def decide(self, round_: int) -> Optional[ProtocolMessage]:
        outgoing: Optional[ProtocolMessage] = None

        if self._inbox:
            candidates, self._inbox = self._inbox, []
            self.state.seen.update(m.between for m in candidates)
            decision = filter_decision(self.state, candidates)
            if decision.message is not None:
                self._improve(round_, decision.output, decision.best_between)
                outgoing = decision.message

        for j in self._pending_boundaries:
            self.state.boundary[j] = self.state.output
        self._pending_boundaries = []

        if self._pending_start is not None:
            j, self._pending_start = self._pending_start, None
            own = self.state.owner
            offers = self.top_level is not None and self.top_level >= j and math.isfinite(self.dhat)
            if offers and self.dhat + self.state.dist_from_between.get(own, 0.0) < self.state.output:
                self._improve(round_, self.dhat + self.state.dist_from_between.get(own, 0.0), own)
                outgoing = ProtocolMessage(
                    kind=MessageKind.FB_OFFER,
                    source=self.source,
                    value=self.dhat,
                    between=own,
                    instance=self.instance_id,
                    iteration=j,
                )

        return outgoing

    def on_emitted(self, message: ProtocolMessage, round_: int) -> None:
        self.emissions[message.iteration] += 1
        self.emitted_outputs.append(self.state.offer_value(message))

class QuiescentIterations(InstanceCoordinator):
    """Snapshot boundaries on quiescence and start the next non-empty level"""

    def __init__(self, instance_id: int, hierarchy: BetweenHierarchy, dhat: Mapping[int, float]):
        self.instance_id = instance_id
        self.hierarchy = hierarchy
        self.dhat = dhat
        self.iteration = hierarchy.depth

    def on_quiescent(self, round_: int, scheduler: ScheduleController) -> bool:
        programs = scheduler.programs_of(self.instance_id)
        j = self.iteration
        while True:
            for program in programs:
                program.state.boundary[j] = program.state.output
            j -= 1
            if j < 0:
                return True
            starters = [b for b in sorted(self.hierarchy.members(j)) if math.isfinite(self.dhat.get(b, INF))]
            if starters:
                for b in starters:
                    scheduler.wake(b, round_ + 1, self.instance_id, j)
                self.iteration = j
                return False

# ==========================================
# OPERATIONS
# ==========================================

@dataclass
class FilterJob:
    source: int
    between: Sequence[int]
    dhat: Mapping[int, float]
    hierarchy_seed: int
    instance_id: Optional[int] = None

@dataclass
class FilteredBroadcastResult:
    source: int
    outputs: List[float]
    states: List[FilterState]
    hierarchy: BetweenHierarchy
    emissions: List[Counter]
    emitted_outputs: List[List[float]]
    metrics: RunMetrics
    transcript: Optional[List[TranscriptEntry]] = None

@dataclass
class FilteredBroadcastBatch:
    results: Dict[int, FilteredBroadcastResult]
    metrics: RunMetrics
    transcript: Optional[List[TranscriptEntry]] = None

def dist_tables_from_matrix(dist: np.ndarray, between: Iterable[int]) -> List[Dict[int, float]]:
    """Per-node {b: dist(b, v)} from a DistanceMatrix"""
    between = sorted(set(between))
    return [{b: float(dist[b, v]) for b in between} for v in range(dist.shape[0])]

def _normalize_tables(graph: Graph, dist_tables: DistTables, between: Iterable[int]) -> List[Mapping[int, float]]:
    if isinstance(dist_tables, np.ndarray):
        return dist_tables_from_matrix(dist_tables, between)
    tables = list(dist_tables)
    if len(tables) != graph.node_count:
        raise InvalidParameterError(f"expected {graph.node_count} distance tables, got {len(tables)}")
    return tables

def _check_dist_tables(graph: Graph, tables: Sequence[Mapping[int, float]], between: Iterable[int]) -> None:
    oracle = oracle_apsp(graph)
    for b in between:
        for v, table in enumerate(tables):
            if table.get(b, INF) != oracle[b, v]:
                raise PreconditionViolationError(
                    f"node {v} holds d({b},{v})={table.get(b, INF)} but dist is {oracle[b, v]}"
                )

def fixed_window_stretch(n: int, jobs: int) -> int:
    """
    FIXED windows of a batch last window · stretch rounds. The stretch
    covers the O(log n) per-iteration load a node carries across
    instances; it never exceeds the instance count.
    """
    return max(1, min(jobs, ceil_log2(n)))

def filtered_broadcast_batch(
    graph: Graph,
    jobs: Sequence[FilterJob],
    dist_tables: DistTables,
    mode: CommunicationMode = CommunicationMode(),
    seed: int = 0,
    policy: IterationPolicy = IterationPolicy.QUIESCENT,
    window: Optional[int] = None,
    stretch: Optional[int] = None,
    delay_bound: Optional[int] = None,
    round_limit: Optional[int] = None,
    record_transcript: bool = False,
    check_preconditions: Optional[bool] = None,
) -> FilteredBroadcastBatch:
    """Many filtered-broadcast instances as one scheduler batch"""
    n = graph.node_count
    window = n if window is None else window
    if window < 1:
        raise InvalidParameterError(f"window must be positive, got {window}")
    stretch = fixed_window_stretch(n, len(jobs)) if stretch is None else stretch
    if stretch < 1:
        raise InvalidParameterError(f"stretch must be positive, got {stretch}")
    effective_window = window * stretch if len(jobs) > 1 else window

    all_between = sorted({b for job in jobs for b in job.between})
    tables = _normalize_tables(graph, dist_tables, all_between)
    if settings.CHECK_PRECONDITIONS if check_preconditions is None else check_preconditions:
        _check_dist_tables(graph, tables, all_between)

    depth = ceil_log2(n)
    instances: List[ScheduledInstance] = []
    hierarchies: Dict[int, BetweenHierarchy] = {}
    for job in jobs:
        iid = job.source if job.instance_id is None else job.instance_id
        hierarchy = sample_between_hierarchy(job.between, n, job.hierarchy_seed)
        hierarchies[iid] = hierarchy
        dhat = {b: job.dhat.get(b, INF) for b in hierarchy.levels[0]}

        def factory(node, job=job, iid=iid, hierarchy=hierarchy, dhat=dhat):
            return FilteredBroadcastInstance(
                instance_id=iid,
                source=job.source,
                owner=node,
                top_level=hierarchy.top.get(node),
                dhat=dhat.get(node, INF),
                dist_from_between=tables[node],
                depth=depth,
                policy=policy,
                window=effective_window,
            )

        coordinator = QuiescentIterations(iid, hierarchy, dhat) if policy == IterationPolicy.QUIESCENT else None
        instances.append(ScheduledInstance(
            descriptor=InstanceDescriptor(
                instance_id=iid,
                kind=InstanceKind.FB,
                dilation=(depth + 1) * window,
                congestion=float(depth + 1),
            ),
            factory=factory,
            coordinator=coordinator,
        ))

    schedule = schedule_parallel(
        graph,
        instances,
        mode=mode,
        seed=seed,
        delay_bound=0 if len(jobs) == 1 else delay_bound,
        round_limit=round_limit,
        record_transcript=record_transcript,
    )

    results: Dict[int, FilteredBroadcastResult] = {}
    for job in jobs:
        iid = job.source if job.instance_id is None else job.instance_id
        programs: List[FilteredBroadcastInstance] = schedule.programs[iid]
        for program in programs:
            program.state.boundary[0] = program.state.output
        results[iid] = FilteredBroadcastResult(
            source=job.source,
            outputs=[p.state.output for p in programs],
            states=[p.state for p in programs],
            hierarchy=hierarchies[iid],
            emissions=[p.emissions for p in programs],
            emitted_outputs=[p.emitted_outputs for p in programs],
            metrics=schedule.metrics,
        )

    logger.debug(
        f"🧮 Filtered broadcast batch: {len(jobs)} instances, policy={policy.value}, "
        f"rounds={schedule.metrics.rounds}, max_node_congestion={schedule.metrics.max_node_congestion}"
    )
    return FilteredBroadcastBatch(results=results, metrics=schedule.metrics, transcript=schedule.transcript)

def filtered_broadcast(
    graph: Graph,
    source: int,
    between: Iterable[int],
    dhat: Mapping[int, float],
    dist_tables: DistTables,
    window: Optional[int] = None,
    mode: CommunicationMode = CommunicationMode(),
    seed: int = 0,
    policy: IterationPolicy = IterationPolicy.FIXED,
    round_limit: Optional[int] = None,
    record_transcript: bool = False,
    check_preconditions: Optional[bool] = None,
) -> FilteredBroadcastResult:
    """
    Single instance. The hierarchy is sampled from `seed`. Default window
    is n; window = h is valid when every relevant hop distance is ≤ h.
    """
    if not 0 <= source < graph.node_count:
        raise InvalidParameterError(f"source {source} is not a node")
    job = FilterJob(source=source, between=sorted(set(between)), dhat=dhat, hierarchy_seed=seed)
    batch = filtered_broadcast_batch(
        graph,
        [job],
        dist_tables,
        mode=mode,
        seed=seed,
        policy=policy,
        window=window,
        round_limit=round_limit,
        record_transcript=record_transcript,
        check_preconditions=check_preconditions,
    )
    result = batch.results[source]
    result.transcript = batch.transcript
    return result
