"""
Near-linear exact weighted APSP.

Sources are sampled into levels S_0 = V, S_1, …, S_k (k = ⌈log₂ n⌉),
node v joining S_i with probability 2^-i, and S_{k+1} = ∅. Phases run
from i = k down to 0:
    1. hop-bounded Bellman-Ford from every s in S_i to depth
       ⌈c·2^(i+1)·ln n⌉, giving dhat
    2. one filtered broadcast per s in S_i with B = S_{i+1}, fed with
       dhat(s, b) and the exact d(b, v) known from phase i+1, giving dbar
    3. d_i(s, v) = min(d_{i+1}(s, v), dhat(s, v), dbar(s, v)) locally

Negative weights go through Johnson reweighting first (bidirectional
communication only).
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, List, Optional, Tuple

import numpy as np

from app.config import settings
from app.core.engine import CommunicationMode, RunMetrics, TranscriptEntry, shift_transcript
from app.core.exceptions import PreconditionViolationError, UnsupportedModeError
from app.core.graph import Graph
from app.core.randomness import RandomStreams, StreamPurpose
from app.schemas.apsp import ApspResultDump, PhaseReport
from app.services.bellman_ford_service import distributed_bellman_ford, virtual_source_bellman_ford
from app.services.broadcast_service import pipelined_broadcast
from app.services.filtered_broadcast_service import FilterJob, filtered_broadcast_batch
from app.services.oracle_service import oracle_apsp
from app.utils.constants import Direction, IterationPolicy
from app.utils.helpers import INF, ceil_log2

logger = logging.getLogger(__name__)

Tables = List[Dict[int, float]]

REDUCED_WEIGHT_SLACK = 1e-9

# ==========================================
# LEVELS
# ==========================================

@dataclass(frozen=True)
class LevelHierarchy:
    """levels[i] = S_i for i = 0..k+1; independent samples, not nested"""
    k: int
    levels: Tuple[FrozenSet[int], ...]

    def level(self, i: int) -> FrozenSet[int]:
        if 0 <= i < len(self.levels):
            return self.levels[i]
        return frozenset()

    def sources_from(self, i: int) -> FrozenSet[int]:
        """∪_{j ≥ i} S_j"""
        return frozenset().union(*self.levels[i:])

def sample_levels(n: int, seed: int) -> LevelHierarchy:
    if n < 1:
        raise PreconditionViolationError(f"sample_levels requires n >= 1, got {n}")
    k = ceil_log2(n)
    streams = RandomStreams(seed)
    draws = [streams.generator(StreamPurpose.LEVELS, v).random(k + 1) for v in range(n)]
    levels = [frozenset(range(n))]
    for i in range(1, k + 1):
        levels.append(frozenset(v for v in range(n) if draws[v][i] < 2.0 ** -i))
    levels.append(frozenset())
    return LevelHierarchy(k=k, levels=tuple(levels))

def hop_depth(i: int, n: int, c: float) -> int:
    """⌈c · 2^(i+1) · ln n⌉, at least 1"""
    return max(1, math.ceil(c * 2 ** (i + 1) * math.log(n))) if n > 1 else 1

# ==========================================
# CONFIG AND RESULTS
# ==========================================

@dataclass
class ApspConfig:
    c: float = field(default_factory=lambda: settings.DEFAULT_C)
    mode: CommunicationMode = field(default_factory=CommunicationMode)
    seed: int = field(default_factory=lambda: settings.DEFAULT_SEED)
    policy: IterationPolicy = IterationPolicy.QUIESCENT
    window: Optional[int] = None
    stretch: Optional[int] = None
    delay_bound: Optional[int] = None
    round_limit: Optional[int] = None
    check_preconditions: Optional[bool] = None
    record_transcript: bool = False

@dataclass
class PhaseResult:
    i: int
    tables: Tables
    dhat: Tables
    dbar: Tables
    metrics: RunMetrics
    report: PhaseReport
    transcript: List[TranscriptEntry] = field(default_factory=list)

@dataclass
class JohnsonResult:
    potentials: List[float]
    reweighted: Graph
    metrics: RunMetrics
    transcript: List[TranscriptEntry] = field(default_factory=list)

@dataclass
class ApspResult:
    distances: np.ndarray
    metrics: RunMetrics
    hierarchy: LevelHierarchy
    phases: List[PhaseReport]
    config: ApspConfig
    potentials: Optional[List[float]] = None
    johnson_rounds: int = 0
    transcript: Optional[List[TranscriptEntry]] = None

    @property
    def rounds_per_phase(self) -> List[int]:
        return [p.rounds for p in self.phases]

    @property
    def n(self) -> int:
        return self.distances.shape[0]

    def dump(self, verified: bool) -> ApspResultDump:
        return ApspResultDump(
            n=self.n,
            seed=self.config.seed,
            mode=self.config.mode.label,
            c=self.config.c,
            rounds_total=self.metrics.rounds,
            rounds_per_phase=self.rounds_per_phase,
            max_node_congestion=self.metrics.max_node_congestion,
            verified=verified,
        )

# ==========================================
# JOHNSON
# ==========================================

def reduced_weight(phi_tail: float, weight: float, phi_head: float) -> float:
    """
    φ(x) + w − φ(y). Valid potentials make it non-negative; float noise
    within REDUCED_WEIGHT_SLACK is snapped to 0, anything below raises.
    """
    reduced = phi_tail + weight - phi_head
    if reduced >= 0:
        return reduced
    slack = REDUCED_WEIGHT_SLACK * max(1.0, abs(phi_tail), abs(weight), abs(phi_head))
    if reduced < -slack:
        raise PreconditionViolationError(
            f"potentials give reduced weight {reduced} (φ_tail={phi_tail}, w={weight}, φ_head={phi_head})"
        )
    return 0.0

def johnson_reweight(
    graph: Graph,
    mode: CommunicationMode = CommunicationMode(),
    seed: int = 0,
    round_limit: Optional[int] = None,
    record_transcript: bool = False,
) -> JohnsonResult:
    """
    φ(v) = dist(s*, v) by virtual-source Bellman-Ford, disseminated with a
    pipelined broadcast; w'(x, y) = φ(x) + w(x, y) − φ(y) ≥ 0.
    """
    if mode.direction != Direction.BIDIRECTIONAL:
        raise UnsupportedModeError("negative weights require bidirectional communication")

    potentials = virtual_source_bellman_ford(
        graph, mode=mode, seed=seed, round_limit=round_limit, record_transcript=record_transcript
    )
    broadcast = pipelined_broadcast(
        graph,
        {v: [phi] for v, phi in enumerate(potentials.potentials)},
        mode=mode,
        seed=seed,
        round_limit=round_limit,
        per_component=True,
        record_transcript=record_transcript,
    )

    reweighted = []
    for tail, head, weight in graph.edges:
        known = dict(broadcast.stores[tail])
        reweighted.append((tail, head, reduced_weight(known[tail], weight, known[head])))

    metrics = RunMetrics().absorb(potentials.metrics).absorb(broadcast.metrics)
    logger.info(f"⚖️  Johnson reweighting: rounds={metrics.rounds} (bellman-ford {potentials.metrics.rounds}, broadcast {broadcast.metrics.rounds})")
    transcript = list(potentials.transcript or ()) + shift_transcript(broadcast.transcript, potentials.metrics.rounds)
    return JohnsonResult(potentials.potentials, graph.with_weights(reweighted), metrics, transcript)

# ==========================================
# PHASES
# ==========================================

def _check_phase_contract(graph: Graph, tables: Tables, sources) -> None:
    oracle = oracle_apsp(graph)
    for s in sources:
        for v, table in enumerate(tables):
            if table.get(s, INF) != oracle[s, v]:
                raise PreconditionViolationError(f"node {v} holds d({s},{v})={table.get(s, INF)} but dist is {oracle[s, v]}")

def run_phase(
    graph: Graph,
    i: int,
    hierarchy: LevelHierarchy,
    prior: Tables,
    config: ApspConfig,
) -> PhaseResult:
    n = graph.node_count
    sources = sorted(hierarchy.level(i))
    between = sorted(hierarchy.level(i + 1))
    depth = hop_depth(i, n, config.c)
    streams = RandomStreams(config.seed)
    check = settings.CHECK_PRECONDITIONS if config.check_preconditions is None else config.check_preconditions

    if check:
        _check_phase_contract(graph, prior, hierarchy.sources_from(i + 1))

    bf = distributed_bellman_ford(
        graph,
        sources,
        depth,
        mode=config.mode,
        seed=streams.derive_seed(StreamPurpose.DELAYS, i, 0),
        delay_bound=config.delay_bound,
        round_limit=config.round_limit,
        record_transcript=config.record_transcript,
    )
    dhat: Tables = [dict(t.entries) for t in bf.tables]

    dbar: Tables = [dict() for _ in range(n)]
    fb_metrics = RunMetrics()
    transcript: List[TranscriptEntry] = list(bf.transcript or ())
    if sources and between:
        jobs = [
            FilterJob(
                source=s,
                between=between,
                dhat={b: dhat[b].get(s, INF) for b in between},
                hierarchy_seed=streams.derive_seed(StreamPurpose.BETWEEN, i, s),
            )
            for s in sources
        ]
        dist_tables = [{b: prior[v].get(b, INF) for b in between} for v in range(n)]
        batch = filtered_broadcast_batch(
            graph,
            jobs,
            dist_tables,
            mode=config.mode,
            seed=streams.derive_seed(StreamPurpose.DELAYS, i, 1),
            policy=config.policy,
            window=config.window,
            stretch=config.stretch,
            delay_bound=config.delay_bound,
            round_limit=config.round_limit,
            record_transcript=config.record_transcript,
            check_preconditions=False,
        )
        fb_metrics = batch.metrics
        transcript.extend(shift_transcript(batch.transcript, bf.metrics.rounds))
        for s, result in batch.results.items():
            for v, value in enumerate(result.outputs):
                if math.isfinite(value):
                    dbar[v][s] = value

    tables: Tables = [dict(t) for t in prior]
    for v in range(n):
        for s in sources:
            best = min(prior[v].get(s, INF), dhat[v].get(s, INF), dbar[v].get(s, INF))
            if math.isfinite(best):
                tables[v][s] = best

    metrics = RunMetrics().absorb(bf.metrics).absorb(fb_metrics)
    report = PhaseReport(
        i=i,
        sources=len(sources),
        between=len(between),
        hop_depth=depth,
        bf_rounds=bf.metrics.rounds,
        fb_rounds=fb_metrics.rounds,
        rounds=metrics.rounds,
    )
    logger.info(f"🧩 Phase {i}: |S_i|={len(sources)}, |S_i+1|={len(between)}, h={depth}, rounds={metrics.rounds}")
    return PhaseResult(i=i, tables=tables, dhat=dhat, dbar=dbar, metrics=metrics, report=report, transcript=transcript)

# ==========================================
# DRIVER
# ==========================================

def run_apsp(
    graph: Graph,
    config: Optional[ApspConfig] = None,
    observer: Optional[Callable[[PhaseResult], None]] = None,
) -> ApspResult:
    """
    After phase 0 every node v holds d^v(u, v) = dist(u, v) for all u.
    distances[u, v] is the value known at v.
    """
    config = config or ApspConfig()
    n = graph.node_count
    metrics = RunMetrics()
    hierarchy = sample_levels(n, config.seed)

    logger.info(f"🚀 APSP start: {graph}, mode={config.mode.label}, c={config.c}, seed={config.seed}")

    if n == 1:
        return ApspResult(np.zeros((1, 1)), metrics, hierarchy, [], config)

    work = graph
    transcript: List[TranscriptEntry] = []
    potentials: Optional[List[float]] = None
    johnson_rounds = 0
    if graph.has_negative_weights:
        johnson = johnson_reweight(
            graph,
            mode=config.mode,
            seed=config.seed,
            round_limit=config.round_limit,
            record_transcript=config.record_transcript,
        )
        transcript.extend(johnson.transcript)
        work = johnson.reweighted
        potentials = johnson.potentials
        johnson_rounds = johnson.metrics.rounds
        metrics.absorb(johnson.metrics)

    tables: Tables = [dict() for _ in range(n)]
    phases: List[PhaseReport] = []
    for i in range(hierarchy.k, -1, -1):
        phase = run_phase(work, i, hierarchy, tables, config)
        tables = phase.tables
        transcript.extend(shift_transcript(phase.transcript, metrics.rounds))
        metrics.absorb(phase.metrics)
        phases.append(phase.report)
        if observer is not None:
            observer(phase)

    distances = np.full((n, n), INF)
    for v, table in enumerate(tables):
        for s, value in table.items():
            distances[s, v] = value
    if potentials is not None:
        phi = np.asarray(potentials)
        finite = np.isfinite(distances)
        distances[finite] = (distances + phi[np.newaxis, :] - phi[:, np.newaxis])[finite]

    logger.info(
        f"✅ APSP done: rounds_total={metrics.rounds}, per_phase={[p.rounds for p in phases]}, "
        f"max_node_congestion={metrics.max_node_congestion}"
    )
    return ApspResult(
        distances,
        metrics,
        hierarchy,
        phases,
        config,
        potentials,
        johnson_rounds,
        transcript=transcript if config.record_transcript else None,
    )
