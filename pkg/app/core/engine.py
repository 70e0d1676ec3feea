"""
Motor de rondas síncronas bajo CONGEST.

Cada ronda r (numeradas desde 1):
    1. controller.before_round(r)
    2. on_round_start(r) en cada nodo
    3. entrega de lo emitido en r-1 (receptores ascendentes, luego emisores)
    4. emit() por nodo (BROADCAST) o emit_to(vecino) por enlace (UNICAST)
    5. controller.after_round(r, emisiones)

La simulación termina cuando no hay mensajes en vuelo, todos los
programas señalan terminación y el controlador también.
"""
import csv
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import List, Mapping, NamedTuple, Optional, Sequence, TextIO, Tuple, Union

import numpy as np

from app.config import settings
from app.core.exceptions import InvalidParameterError, MessageDisciplineError, RoundLimitExceededError
from app.core.graph import Graph
from app.core.randomness import RandomStreams, StreamPurpose
from app.schemas.metrics import RunMetricsSummary
from app.utils.constants import NO_NODE, TRANSCRIPT_HEADER, Direction, Discipline, MessageKind
from app.utils.helpers import format_value

logger = logging.getLogger(__name__)

# ==========================================
# TIPOS DEL CABLE
# ==========================================

@dataclass(frozen=True, slots=True)
class ProtocolMessage:
    """Un mensaje CONGEST de O(log n) bits: (source, between, value) más etiquetas de ruteo"""
    kind: MessageKind
    source: int
    value: float
    between: int = NO_NODE
    hops: int = 0
    instance: int = 0
    iteration: int = -1
    stage: int = 0
    target: int = NO_NODE

@dataclass(frozen=True)
class CommunicationMode:
    direction: Direction = Direction.BIDIRECTIONAL
    discipline: Discipline = Discipline.BROADCAST

    @property
    def label(self) -> str:
        return f"{self.direction.value}/{self.discipline.value}"

class TranscriptEntry(NamedTuple):
    """Una entrega: `round` es la ronda de emisión"""
    round: int
    sender: int
    receiver: int
    kind: str
    source: int
    between: int
    value: float
    instance: int
    iteration: int

# ==========================================
# MÉTRICAS
# ==========================================

@dataclass
class RunMetrics:
    rounds: int = 0
    messages_total: int = 0
    per_node_sent: Counter = field(default_factory=Counter)
    per_edge_load: Counter = field(default_factory=Counter)
    max_queue_depth: int = 0

    @property
    def max_node_congestion(self) -> int:
        return max(self.per_node_sent.values(), default=0)

    @property
    def max_edge_load(self) -> int:
        return max(self.per_edge_load.values(), default=0)

    def record_send(self, node: int, count: int = 1) -> None:
        self.per_node_sent[node] += count
        self.messages_total += count

    def absorb(self, other: "RunMetrics") -> "RunMetrics":
        """Componer una ejecución secuencial posterior"""
        self.rounds += other.rounds
        self.messages_total += other.messages_total
        self.per_node_sent.update(other.per_node_sent)
        self.per_edge_load.update(other.per_edge_load)
        self.max_queue_depth = max(self.max_queue_depth, other.max_queue_depth)
        return self

    def summary(self) -> RunMetricsSummary:
        return RunMetricsSummary(
            rounds=self.rounds,
            messages_total=self.messages_total,
            max_node_congestion=self.max_node_congestion,
            max_edge_load=self.max_edge_load,
            max_queue_depth=self.max_queue_depth,
        )

def record_congestion(metrics: RunMetrics, edge: Tuple[int, int], count: int = 1) -> RunMetrics:
    if count < 0:
        raise InvalidParameterError("congestion counters are monotone")
    metrics.per_edge_load[edge] += count
    return metrics

# ==========================================
# CONTRATO DE LOS PROGRAMAS
# ==========================================

class NodeContext:
    """Lo único que un programa puede ver de la red"""

    def __init__(self, graph: Graph, node_id: int, mode: CommunicationMode, streams: RandomStreams):
        self.node_id = node_id
        self.n = graph.node_count
        self.round = 0
        self.mode = mode
        self.in_weights: Mapping[int, float] = dict(graph.in_adj[node_id])
        self.out_weights: Mapping[int, float] = dict(graph.out_adj[node_id])
        self.neighbors: Tuple[int, ...] = graph.comm_neighbors(node_id, mode.direction)
        self.senders: Tuple[int, ...] = graph.comm_senders(node_id, mode.direction)
        self._streams = streams

    def rng(self, purpose: StreamPurpose, *keys: int) -> np.random.Generator:
        return self._streams.generator(purpose, self.node_id, *keys)

class NodeProgram:
    """Programa de un nodo. Solo lee su propio estado y lo que recibe."""

    def __init__(self):
        self.ctx: Optional[NodeContext] = None
        self._emit_cache_round = -1
        self._emit_cache: Optional[ProtocolMessage] = None

    def bind(self, ctx: NodeContext) -> None:
        self.ctx = ctx

    def on_round_start(self, round_: int) -> None:
        pass

    def on_receive(self, message: ProtocolMessage, sender: int) -> None:
        pass

    def emit(self) -> Optional[ProtocolMessage]:
        return None

    def emit_to(self, neighbor: int) -> Optional[ProtocolMessage]:
        """UNICAST: por defecto el mismo mensaje de emit() en cada enlace"""
        if self._emit_cache_round != self.ctx.round:
            self._emit_cache = self.emit()
            self._emit_cache_round = self.ctx.round
        return self._emit_cache

    def is_done(self) -> bool:
        return True

    def queue_depth(self) -> int:
        return 0

class RoundController:
    """Observador omnisciente de rondas; los programas nunca lo leen"""

    def before_round(self, round_: int) -> None:
        pass

    def after_round(self, round_: int, emissions: List[Tuple[int, ProtocolMessage]]) -> None:
        pass

    def is_done(self) -> bool:
        return True

@dataclass
class SimulationResult:
    programs: List[NodeProgram]
    metrics: RunMetrics
    transcript: Optional[List[TranscriptEntry]] = None

# ==========================================
# BUCLE PRINCIPAL
# ==========================================

def _single(result, node: int, round_: int) -> Optional[ProtocolMessage]:
    if result is None or isinstance(result, ProtocolMessage):
        return result
    if isinstance(result, (list, tuple)):
        if len(result) > 1:
            raise MessageDisciplineError(node, round_)
        return result[0] if result else None
    raise MessageDisciplineError(node, round_, detail=f"emitted a non-message {type(result).__name__}")

def run_simulation(
    graph: Graph,
    programs: Union[Mapping[int, NodeProgram], Sequence[NodeProgram]],
    mode: CommunicationMode = CommunicationMode(),
    seed: int = 0,
    round_limit: Optional[int] = None,
    controller: Optional[RoundController] = None,
    record_transcript: bool = False,
) -> SimulationResult:
    n = graph.node_count
    if isinstance(programs, Mapping):
        if sorted(programs) != list(range(n)):
            raise InvalidParameterError("exactly one program per node is required")
        ordered = [programs[v] for v in range(n)]
    else:
        ordered = list(programs)
        if len(ordered) != n:
            raise InvalidParameterError(f"expected {n} programs, got {len(ordered)}")

    round_limit = round_limit if round_limit is not None else settings.round_limit_for(n)
    controller = controller or RoundController()
    streams = RandomStreams(seed)
    unicast = mode.discipline == Discipline.UNICAST

    contexts = [NodeContext(graph, v, mode, streams) for v in range(n)]
    for v, program in enumerate(ordered):
        program.bind(contexts[v])

    metrics = RunMetrics()
    transcript: Optional[List[TranscriptEntry]] = [] if record_transcript else None
    transcript_cap = settings.TRANSCRIPT_MAX_ENTRIES
    in_flight: List[Tuple[int, int, ProtocolMessage]] = []
    round_ = 0

    logger.debug(f"▶️  Simulation start: {graph}, mode={mode.label}, seed={seed}, limit={round_limit}")

    while in_flight or not all(p.is_done() for p in ordered) or not controller.is_done():
        round_ += 1
        if round_ > round_limit:
            logger.error(f"⛔ Round limit {round_limit} exceeded on {graph}")
            raise RoundLimitExceededError(round_limit, metrics)

        controller.before_round(round_)
        for v, program in enumerate(ordered):
            contexts[v].round = round_
            program.on_round_start(round_)

        in_flight.sort(key=lambda item: (item[0], item[1]))
        for receiver, sender, message in in_flight:
            ordered[receiver].on_receive(message, sender)
        in_flight = []

        emissions: List[Tuple[int, ProtocolMessage]] = []
        for v, program in enumerate(ordered):
            links = contexts[v].neighbors
            if unicast:
                for nbr in links:
                    message = _single(program.emit_to(nbr), v, round_)
                    if message is None:
                        continue
                    emissions.append((v, message))
                    metrics.record_send(v)
                    record_congestion(metrics, (v, nbr))
                    in_flight.append((nbr, v, message))
            else:
                message = _single(program.emit(), v, round_)
                if message is None:
                    continue
                emissions.append((v, message))
                metrics.record_send(v)
                for nbr in links:
                    record_congestion(metrics, (v, nbr))
                    in_flight.append((nbr, v, message))

        if transcript is not None:
            for receiver, sender, message in in_flight:
                if len(transcript) >= transcript_cap:
                    logger.warning(f"⚠️  Transcript truncated at {transcript_cap} entries")
                    transcript = None
                    break
                transcript.append(TranscriptEntry(
                    round_, sender, receiver, message.kind.value, message.source,
                    message.between, message.value, message.instance, message.iteration,
                ))

        if emissions:
            metrics.rounds = round_
        metrics.max_queue_depth = max(metrics.max_queue_depth, max(p.queue_depth() for p in ordered))
        controller.after_round(round_, emissions)

        if logger.isEnabledFor(logging.DEBUG):
            logger.debug(f"round {round_}: {len(emissions)} emissions, {len(in_flight)} deliveries pending")

    logger.debug(
        f"⏹️  Simulation done: rounds={metrics.rounds}, messages={metrics.messages_total}, "
        f"max_node_congestion={metrics.max_node_congestion}"
    )
    return SimulationResult(programs=ordered, metrics=metrics, transcript=transcript)

def shift_transcript(entries: Optional[Sequence[TranscriptEntry]], offset: int) -> List[TranscriptEntry]:
    """Renumerar las rondas de una ejecución secuencial posterior tras `offset` rondas"""
    return [entry._replace(round=entry.round + offset) for entry in entries or ()]

def write_transcript_csv(entries: Sequence[TranscriptEntry], stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(TRANSCRIPT_HEADER)
    for entry in entries:
        writer.writerow([
            entry.round, entry.sender, entry.receiver, entry.kind, entry.source,
            entry.between, format_value(entry.value), entry.instance, entry.iteration,
        ])
