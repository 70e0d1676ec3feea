import numpy as np
import pytest

from app.core.engine import CommunicationMode, NodeContext, ProtocolMessage
from app.core.exceptions import InvalidParameterError, QueueStarvationError, RoundLimitExceededError
from app.core.graph import Graph
from app.core.randomness import RandomStreams, StreamPurpose
from app.services.apsp_service import sample_levels
from app.services.bellman_ford_service import bellman_ford_instances
from app.services.filtered_broadcast_service import FilterJob, filtered_broadcast_batch
from app.services.oracle_service import dist_through_oracle, oracle_apsp
from app.services.scheduler_service import (
    InstanceDescriptor,
    InstanceProgram,
    MultiplexNode,
    ScheduledInstance,
    ScheduleLedger,
    default_delay_bound,
    run_solo,
    schedule_parallel,
)
from app.utils.constants import Discipline, InstanceKind, IterationPolicy, MessageKind
from app.utils.helpers import INF, ceil_log2

class Scripted(InstanceProgram):
    """Emits whatever the test puts in `next`"""

    def __init__(self, instance_id):
        super().__init__(instance_id)
        self.next = None
        self.emitted = []

    def decide(self, round_):
        return self.next

    def on_emitted(self, message, round_):
        self.emitted.append((message.value, round_))

def message(instance, value):
    return ProtocolMessage(kind=MessageKind.BF_RELAX, source=0, value=value, instance=instance)

def hosted(unicast=False):
    graph = Graph(3, [(0, 1, 1.0), (0, 2, 1.0)])
    programs = {1: Scripted(1), 2: Scripted(2)}
    ledger = ScheduleLedger()
    host = MultiplexNode(0, programs, {1: 1, 2: 1}, ledger, unicast=unicast)
    ctx = NodeContext(graph, 0, CommunicationMode(), RandomStreams(0))
    host.bind(ctx)
    return host, ctx, programs, ledger

# ==========================================
# FIFO CON REEMPLAZO
# ==========================================

def test_fifo_across_instances():
    host, ctx, programs, ledger = hosted()
    ctx.round = 1
    host.on_round_start(1)
    programs[1].next = message(1, 10.0)
    programs[2].next = message(2, 20.0)
    programs[1].request_emit()
    programs[2].request_emit()
    assert host.emit().value == 10.0
    assert host.queue_depth() == 1
    assert ledger.queued[2] == 1

def test_newer_message_replaces_in_place():
    host, ctx, programs, ledger = hosted()
    ctx.round = 1
    programs[1].next = message(1, 10.0)
    programs[2].next = message(2, 20.0)
    programs[1].request_emit()
    programs[2].request_emit()
    host.emit()

    ctx.round = 2
    programs[1].next = message(1, 11.0)
    programs[2].next = message(2, 19.0)
    programs[1].request_emit()
    programs[2].request_emit()
    # instance 2 keeps the head of the queue with its newer payload
    assert host.emit().value == 19.0
    ctx.round = 3
    assert host.emit().value == 11.0
    assert host.emit() is None
    assert programs[2].emitted == [(19.0, 2)]
    assert ledger.queued[1] == 0 and ledger.queued[2] == 0

def test_unicast_keeps_per_link_queues():
    host, ctx, programs, _ = hosted(unicast=True)
    ctx.round = 1
    programs[1].next = ProtocolMessage(kind=MessageKind.BCAST, source=0, value=1.0, instance=1, target=2)
    programs[1].request_emit()
    assert host.emit_to(1) is None
    assert host.emit_to(2).value == 1.0

def test_wake_must_be_in_the_future():
    host, ctx, programs, _ = hosted()
    ctx.round = 4
    with pytest.raises(InvalidParameterError):
        programs[1].wake_at(4)

# ==========================================
# RETARDOS
# ==========================================

def test_default_delay_bound():
    descriptors = [
        InstanceDescriptor(0, InstanceKind.BF, congestion=1.0),
        InstanceDescriptor(1, InstanceKind.FB, congestion=2.5),
    ]
    assert default_delay_bound(descriptors) == 4
    assert default_delay_bound(descriptors, observed_congestion=2) == 2
    assert default_delay_bound([]) == 0

def test_delays_are_seeded_and_bounded(random_graph):
    g = random_graph(10, p=0.3, seed=1)
    instances = bellman_ford_instances(g, range(10), h=3)
    a = schedule_parallel(g, instances, seed=5, delay_bound=6)
    b = schedule_parallel(g, instances, seed=5, delay_bound=6)
    delays = [d.delay for d in a.descriptors.values()]
    assert delays == [d.delay for d in b.descriptors.values()]
    assert all(0 <= d <= 6 for d in delays)
    expected = [
        int(RandomStreams(5).generator(StreamPurpose.DELAYS, iid).integers(0, 7))
        for iid in sorted(a.descriptors)
    ]
    assert delays == expected

def test_zero_delay_bound(random_graph):
    g = random_graph(8, seed=2)
    result = schedule_parallel(g, bellman_ford_instances(g, range(8), h=2), delay_bound=0)
    assert all(d.delay == 0 for d in result.descriptors.values())

def test_duplicate_instance_ids_rejected(random_graph):
    g = random_graph(5, seed=0)
    instances = bellman_ford_instances(g, [1], h=2) * 2
    with pytest.raises(InvalidParameterError):
        schedule_parallel(g, instances)

# ==========================================
# INANICIÓN
# ==========================================

class Restless(InstanceProgram):
    def on_activate(self, round_):
        self.wake_at(round_ + 1)

    def on_wake(self, round_, tag):
        self.wake_at(round_ + 1)
        self.request_emit()

    def decide(self, round_):
        return message(self.instance_id, 0.0)

def test_queue_starvation_names_the_instance():
    g = Graph(2, [(0, 1, 1.0)])
    instance = ScheduledInstance(InstanceDescriptor(7, InstanceKind.BF), factory=lambda node: Restless(7))
    with pytest.raises(QueueStarvationError) as exc:
        run_solo(g, instance, round_limit=12)
    assert exc.value.instance_id == 7
    assert isinstance(exc.value, RoundLimitExceededError)

# ==========================================
# EQUIVALENCIA CON EJECUCIONES SOLITARIAS
# ==========================================

def test_linkless_unicast_host_terminates():
    g = Graph(3, [(0, 1, 2.0)])
    result = schedule_parallel(
        g,
        bellman_ford_instances(g, [0, 2], h=2),
        mode=CommunicationMode(discipline=Discipline.UNICAST),
        delay_bound=0,
    )
    assert result.programs[0][1].estimate == 2.0
    assert result.programs[2][2].estimate == 0.0
    assert result.programs[2][0].estimate == INF

@pytest.mark.parametrize("seed", range(3))
def test_parallel_filtered_broadcasts_match_solo(random_graph, seed):
    g = random_graph(20, p=0.25, seed=seed)
    dist = oracle_apsp(g)
    rng = np.random.default_rng(seed)
    between = sorted(rng.choice(20, size=8, replace=False).tolist())
    sources = [0, 3, 7, 11]
    jobs = [
        FilterJob(
            source=s,
            between=between,
            dhat={b: float(rng.integers(0, 50)) for b in between},
            hierarchy_seed=100 + s,
        )
        for s in sources
    ]

    batch = filtered_broadcast_batch(g, jobs, dist, seed=seed, policy=IterationPolicy.QUIESCENT)
    for job in jobs:
        solo = filtered_broadcast_batch(g, [job], dist, seed=seed, policy=IterationPolicy.FIXED)
        expected = dist_through_oracle(job.dhat, dist, between)
        assert batch.results[job.source].outputs == solo.results[job.source].outputs
        assert np.array_equal(np.asarray(batch.results[job.source].outputs), expected)

# Calibrated at n=32
SCHEDULE_GAMMA = 4

@pytest.mark.parametrize("seed", range(2))
def test_parallel_rounds_within_dilation_plus_congestion(random_graph, seed):
    n = 32
    g = random_graph(n, p=0.12, seed=seed)
    dist = oracle_apsp(g)
    levels = sample_levels(n, seed)
    between = sorted(levels.level(2)) or [0]
    rng = np.random.default_rng(seed)
    jobs = [
        FilterJob(source=s, between=between, dhat={b: float(rng.integers(0, 50)) for b in between}, hierarchy_seed=200 + s)
        for s in sorted(levels.level(1))
    ]

    batch = filtered_broadcast_batch(g, jobs, dist, seed=seed, policy=IterationPolicy.QUIESCENT)
    solos = [filtered_broadcast_batch(g, [job], dist, seed=seed, policy=IterationPolicy.QUIESCENT) for job in jobs]
    dilation = max(solo.metrics.rounds for solo in solos)
    congestion = batch.metrics.max_node_congestion

    assert batch.metrics.rounds <= SCHEDULE_GAMMA * (dilation + congestion * ceil_log2(n))
    for job, solo in zip(jobs, solos):
        assert batch.results[job.source].outputs == solo.results[job.source].outputs

def test_completion_rounds_recorded(random_graph):
    g = random_graph(12, p=0.3, seed=4)
    result = schedule_parallel(g, bellman_ford_instances(g, [0, 5], h=4), seed=1)
    assert set(result.completion_rounds) == {0, 5}
    assert all(r >= 1 for r in result.completion_rounds.values())
