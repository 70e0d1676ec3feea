"""
Parallel execution of many protocol instances under CONGEST bandwidth.

Random initial delay per instance plus, at every node, one FIFO of
pending emissions across instances. A newer message of an instance that
is already queued replaces the queued payload in place, so the instance
keeps its position. In UNICAST discipline the FIFO is kept per link.
"""
import logging
import math
from collections import Counter, OrderedDict, defaultdict
from dataclasses import dataclass, replace
from typing import Callable, Dict, List, Optional, Sequence, Set, Tuple

from app.core.engine import (
    CommunicationMode,
    NodeProgram,
    ProtocolMessage,
    RoundController,
    RunMetrics,
    TranscriptEntry,
    run_simulation,
)
from app.core.exceptions import InvalidParameterError, QueueStarvationError, RoundLimitExceededError
from app.core.graph import Graph
from app.core.randomness import RandomStreams, StreamPurpose
from app.utils.constants import NO_NODE, Discipline, InstanceKind

logger = logging.getLogger(__name__)

@dataclass(frozen=True)
class InstanceDescriptor:
    instance_id: int
    kind: InstanceKind
    dilation: int = 0
    congestion: float = 1.0
    delay: int = 0

class InstanceProgram:
    """Per-node logic of one instance, hosted by a MultiplexNode"""

    def __init__(self, instance_id: int):
        self.instance_id = instance_id
        self.host: Optional["MultiplexNode"] = None

    @property
    def ctx(self):
        return self.host.ctx

    @property
    def node_id(self) -> int:
        return self.host.node_id

    def request_emit(self) -> None:
        self.host.mark_dirty(self.instance_id)

    def wake_at(self, round_: int, tag=None) -> None:
        self.host.wake_at(round_, self.instance_id, tag)

    def on_activate(self, round_: int) -> None:
        pass

    def on_wake(self, round_: int, tag) -> None:
        pass

    def on_receive(self, message: ProtocolMessage, sender: int) -> None:
        pass

    def decide(self, round_: int) -> Optional[ProtocolMessage]:
        """Called in the emission phase of a round where request_emit() was made"""
        return None

    def on_emitted(self, message: ProtocolMessage, round_: int) -> None:
        pass

    def is_done(self) -> bool:
        return True

class InstanceCoordinator:
    """Omniscient hook invoked when an instance goes quiescent"""

    def on_quiescent(self, round_: int, scheduler: "ScheduleController") -> bool:
        """Return True when the instance is complete"""
        return True

@dataclass
class ScheduledInstance:
    descriptor: InstanceDescriptor
    factory: Callable[[int], InstanceProgram]
    coordinator: Optional[InstanceCoordinator] = None

class ScheduleLedger:
    """Shared counters the controller reads to detect per-instance quiescence"""

    def __init__(self):
        self.queued: Counter = Counter()
        self.timers: Counter = Counter()
        self.dirty: Counter = Counter()
        self.emitted: Set[int] = set()

class MultiplexNode(NodeProgram):
    """Node program hosting one InstanceProgram per instance"""

    def __init__(
        self,
        node_id: int,
        programs: Dict[int, InstanceProgram],
        start_rounds: Dict[int, int],
        ledger: ScheduleLedger,
        unicast: bool = False,
    ):
        super().__init__()
        self.node_id = node_id
        self.programs = programs
        self.ledger = ledger
        self.unicast = unicast
        for program in programs.values():
            program.host = self

        self._activations: Dict[int, List[int]] = defaultdict(list)
        for instance_id in sorted(programs):
            self._activations[start_rounds[instance_id]].append(instance_id)
        self._timers: Dict[int, List[Tuple[int, object]]] = defaultdict(list)
        self._dirty: Set[int] = set()
        self._queue: "OrderedDict[int, ProtocolMessage]" = OrderedDict()
        self._link_queues: Dict[int, "OrderedDict[int, ProtocolMessage]"] = {}
        self._decided_round = -1

    def bind(self, ctx) -> None:
        super().bind(ctx)
        self._link_queues = {nbr: OrderedDict() for nbr in ctx.neighbors}

    # ==========================================
    # SERVICES FOR HOSTED PROGRAMS
    # ==========================================

    def mark_dirty(self, instance_id: int) -> None:
        if instance_id not in self._dirty:
            self._dirty.add(instance_id)
            self.ledger.dirty[instance_id] += 1

    def wake_at(self, round_: int, instance_id: int, tag=None) -> None:
        current = self.ctx.round if self.ctx else 0
        if round_ <= current:
            raise InvalidParameterError(f"wake-up round {round_} is not in the future (current {current})")
        self._timers[round_].append((instance_id, tag))
        self.ledger.timers[instance_id] += 1

    # ==========================================
    # ENGINE HANDLERS
    # ==========================================

    def on_round_start(self, round_: int) -> None:
        for instance_id in self._activations.pop(round_, ()):
            self.programs[instance_id].on_activate(round_)
        for instance_id, tag in self._timers.pop(round_, ()):
            self.ledger.timers[instance_id] -= 1
            self.programs[instance_id].on_wake(round_, tag)

    def on_receive(self, message: ProtocolMessage, sender: int) -> None:
        program = self.programs.get(message.instance)
        if program is not None:
            program.on_receive(message, sender)

    def _enqueue(self, queue: "OrderedDict[int, ProtocolMessage]", instance_id: int, message: ProtocolMessage) -> None:
        if instance_id not in queue:
            self.ledger.queued[instance_id] += 1
        queue[instance_id] = message

    def _decide(self, round_: int) -> None:
        if self._decided_round == round_:
            return
        self._decided_round = round_
        dirty, self._dirty = self._dirty, set()
        for instance_id in sorted(dirty):
            self.ledger.dirty[instance_id] -= 1
            message = self.programs[instance_id].decide(round_)
            if message is None:
                continue
            if not self.unicast:
                self._enqueue(self._queue, instance_id, message)
            elif message.target != NO_NODE:
                if message.target in self._link_queues:
                    self._enqueue(self._link_queues[message.target], instance_id, message)
            else:
                for queue in self._link_queues.values():
                    self._enqueue(queue, instance_id, message)

    def flush(self, round_: int) -> None:
        self._decide(round_)

    def _pop(self, queue: "OrderedDict[int, ProtocolMessage]", round_: int) -> Optional[ProtocolMessage]:
        if not queue:
            return None
        instance_id, message = queue.popitem(last=False)
        self.ledger.queued[instance_id] -= 1
        self.ledger.emitted.add(instance_id)
        self.programs[instance_id].on_emitted(message, round_)
        return message

    def emit(self) -> Optional[ProtocolMessage]:
        round_ = self.ctx.round
        self._decide(round_)
        return self._pop(self._queue, round_)

    def emit_to(self, neighbor: int) -> Optional[ProtocolMessage]:
        round_ = self.ctx.round
        self._decide(round_)
        return self._pop(self._link_queues[neighbor], round_)

    def is_done(self) -> bool:
        return (
            not self._queue
            and not any(self._link_queues.values())
            and not self._activations
            and not self._timers
            and not self._dirty
            and all(p.is_done() for p in self.programs.values())
        )

    def queue_depth(self) -> int:
        if self.unicast:
            return max((len(q) for q in self._link_queues.values()), default=0)
        return len(self._queue)

class ScheduleController(RoundController):
    """Detects per-instance quiescence: nothing queued, nothing in flight, nothing pending"""

    def __init__(
        self,
        hosts: List[MultiplexNode],
        ledger: ScheduleLedger,
        instances: Sequence[ScheduledInstance],
        start_rounds: Dict[int, int],
    ):
        self.hosts = hosts
        self.ledger = ledger
        self.start_rounds = start_rounds
        self.coordinators = {inst.descriptor.instance_id: inst.coordinator for inst in instances}
        self.pending: Set[int] = set(self.coordinators)
        self.completion_rounds: Dict[int, int] = {}
        self.current_round = 0

    def programs_of(self, instance_id: int) -> List[InstanceProgram]:
        return [host.programs[instance_id] for host in self.hosts]

    def wake(self, node: int, round_: int, instance_id: int, tag=None) -> None:
        self.hosts[node].wake_at(round_, instance_id, tag)

    def before_round(self, round_: int) -> None:
        self.current_round = round_
        self.ledger.emitted.clear()

    def _quiescent(self, instance_id: int, round_: int) -> bool:
        return (
            self.start_rounds[instance_id] <= round_
            and self.ledger.queued[instance_id] == 0
            and self.ledger.timers[instance_id] == 0
            and self.ledger.dirty[instance_id] == 0
            and instance_id not in self.ledger.emitted
        )

    def after_round(self, round_: int, emissions) -> None:
        # hosts without links never reach emit_to
        for host in self.hosts:
            host.flush(round_)
        for instance_id in sorted(self.pending):
            if not self._quiescent(instance_id, round_):
                continue
            coordinator = self.coordinators[instance_id]
            if coordinator is None or coordinator.on_quiescent(round_, self):
                self.pending.discard(instance_id)
                self.completion_rounds[instance_id] = round_

    def is_done(self) -> bool:
        return not self.pending

    def stuck_instance(self) -> int:
        backlogged = [iid for iid in sorted(self.pending) if self.ledger.queued[iid] > 0]
        if backlogged:
            return backlogged[0]
        return min(self.pending) if self.pending else -1

@dataclass
class ScheduleResult:
    programs: Dict[int, List[InstanceProgram]]
    descriptors: Dict[int, InstanceDescriptor]
    metrics: RunMetrics
    completion_rounds: Dict[int, int]
    transcript: Optional[List[TranscriptEntry]] = None

def default_delay_bound(descriptors: Sequence[InstanceDescriptor], observed_congestion: Optional[float] = None) -> int:
    """⌈Σ declared per-node congestion⌉, clamped by the observed value when known"""
    declared = math.ceil(sum(d.congestion for d in descriptors))
    if observed_congestion is not None:
        declared = min(declared, math.ceil(observed_congestion))
    return max(0, declared)

def schedule_parallel(
    graph: Graph,
    instances: Sequence[ScheduledInstance],
    mode: CommunicationMode = CommunicationMode(),
    seed: int = 0,
    delay_bound: Optional[int] = None,
    observed_congestion: Optional[float] = None,
    round_limit: Optional[int] = None,
    record_transcript: bool = False,
) -> ScheduleResult:
    """
    Run all instances together. Outputs per instance equal the solo-run
    outputs for delay-tolerant programs; measured rounds are reported.
    """
    ids = [inst.descriptor.instance_id for inst in instances]
    if len(set(ids)) != len(ids):
        raise InvalidParameterError("instance ids must be unique")
    if any(iid < 0 for iid in ids):
        raise InvalidParameterError("instance ids must be non-negative")

    descriptors = [inst.descriptor for inst in instances]
    bound = default_delay_bound(descriptors, observed_congestion) if delay_bound is None else delay_bound
    if bound < 0:
        raise InvalidParameterError(f"delay_bound must be non-negative, got {bound}")

    streams = RandomStreams(seed)
    scheduled: Dict[int, InstanceDescriptor] = {}
    start_rounds: Dict[int, int] = {}
    for descriptor in descriptors:
        delay = 0 if bound == 0 else int(streams.generator(StreamPurpose.DELAYS, descriptor.instance_id).integers(0, bound + 1))
        scheduled[descriptor.instance_id] = replace(descriptor, delay=delay)
        start_rounds[descriptor.instance_id] = delay + 1

    ledger = ScheduleLedger()
    unicast = mode.discipline == Discipline.UNICAST
    hosts = [
        MultiplexNode(
            node,
            {inst.descriptor.instance_id: inst.factory(node) for inst in instances},
            start_rounds,
            ledger,
            unicast=unicast,
        )
        for node in range(graph.node_count)
    ]
    controller = ScheduleController(hosts, ledger, instances, start_rounds)

    logger.debug(f"🗓️  Scheduling {len(instances)} instances on {graph}, delay_bound={bound}")
    try:
        result = run_simulation(
            graph,
            hosts,
            mode=mode,
            seed=seed,
            round_limit=round_limit,
            controller=controller,
            record_transcript=record_transcript,
        )
    except RoundLimitExceededError as exc:
        stuck = controller.stuck_instance()
        logger.error(f"⛔ Instance {stuck} starved after {exc.round_limit} rounds")
        raise QueueStarvationError(stuck, exc.round_limit, exc.metrics) from exc

    return ScheduleResult(
        programs={iid: controller.programs_of(iid) for iid in ids},
        descriptors=scheduled,
        metrics=result.metrics,
        completion_rounds=dict(controller.completion_rounds),
        transcript=result.transcript,
    )

def run_solo(
    graph: Graph,
    instance: ScheduledInstance,
    mode: CommunicationMode = CommunicationMode(),
    seed: int = 0,
    round_limit: Optional[int] = None,
    record_transcript: bool = False,
) -> ScheduleResult:
    """A solo run is a single-instance schedule with no delay"""
    return schedule_parallel(
        graph,
        [instance],
        mode=mode,
        seed=seed,
        delay_bound=0,
        round_limit=round_limit,
        record_transcript=record_transcript,
    )
