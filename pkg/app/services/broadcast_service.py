"""
Pipelined global broadcast over a distributively built BFS tree.

0. ELECT (per-component runs only): every node floods the lowest id it
   has seen; the component minima become the roots.
1. TREE: each root floods; a node adopts as parent the lowest-id sender
   from the first round it hears TREE, and announces itself with
   target=parent so the parent learns its children.
2. UP: every node forwards its own items and its children's items to
   the parent, one per round, FIFO, then UP_DONE once its subtree is
   exhausted.
3. DOWN: the root pipelines the sorted item list down the tree,
   followed by DOWN_DONE.

Without per-component roots node 0 is the only root and nodes outside its
component are reported as unreachable. Bidirectional communication only.
"""
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Deque, List, Mapping, Optional, Sequence, Set, Tuple

from app.config import settings
from app.core.engine import (
    CommunicationMode,
    NodeProgram,
    ProtocolMessage,
    RunMetrics,
    SimulationResult,
    TranscriptEntry,
    run_simulation,
    shift_transcript,
)
from app.core.exceptions import UnreachableNodesError, UnsupportedModeError
from app.core.graph import Graph
from app.utils.constants import NO_NODE, BroadcastStage, Direction, MessageKind

logger = logging.getLogger(__name__)

ROOT = 0

Item = Tuple[int, float]

class LeaderElectionNode(NodeProgram):
    """Min-id flooding; quiesces once every component agrees on its minimum"""

    def __init__(self):
        super().__init__()
        self.leader: Optional[int] = None
        self._changed = False

    def on_round_start(self, round_: int) -> None:
        if round_ == 1:
            self.leader = self.ctx.node_id
            self._changed = True

    def on_receive(self, message: ProtocolMessage, sender: int) -> None:
        if message.stage == BroadcastStage.ELECT and message.source < self.leader:
            self.leader = message.source
            self._changed = True

    def emit(self) -> Optional[ProtocolMessage]:
        if not self._changed:
            return None
        self._changed = False
        return ProtocolMessage(kind=MessageKind.BCAST, source=self.leader, value=0.0, stage=int(BroadcastStage.ELECT))

    def is_done(self) -> bool:
        return self.leader is not None and not self._changed

def elect_component_roots(
    graph: Graph,
    mode: CommunicationMode = CommunicationMode(),
    seed: int = 0,
    round_limit: Optional[int] = None,
    record_transcript: bool = False,
) -> Tuple[List[int], SimulationResult]:
    """Lowest id of every weakly connected component, found by flooding"""
    programs = [LeaderElectionNode() for _ in range(graph.node_count)]
    result = run_simulation(graph, programs, mode=mode, seed=seed, round_limit=round_limit, record_transcript=record_transcript)
    roots = sorted(v for v, p in enumerate(programs) if p.leader == v)
    return roots, result

class PipelinedBroadcastNode(NodeProgram):

    def __init__(self, items: Sequence[float], root: bool = False):
        super().__init__()
        self.root = root
        self.own_items: List[float] = list(items)
        self.store: List[Item] = []
        self.parent: Optional[int] = None
        self.depth: Optional[int] = None
        self.children: Set[int] = set()
        self.joined_round: Optional[int] = None
        self.children_done: Set[int] = set()
        self.up_done_sent = False
        self.finished = False
        self._tree_candidates: List[Tuple[int, int]] = []
        self._outbox: Deque[ProtocolMessage] = deque()
        self._collected: List[Item] = []

    @property
    def is_root(self) -> bool:
        return self.root

    def _message(self, stage: BroadcastStage, source: int = NO_NODE, value: float = 0.0, target: int = NO_NODE) -> ProtocolMessage:
        return ProtocolMessage(kind=MessageKind.BCAST, source=source, value=value, stage=int(stage), target=target)

    def _join(self, round_: int, parent: Optional[int], depth: int) -> None:
        self.parent, self.depth, self.joined_round = parent, depth, round_
        self._outbox.append(self._message(BroadcastStage.TREE, source=self.ctx.node_id, value=depth, target=parent if parent is not None else NO_NODE))
        own = [(self.ctx.node_id, value) for value in self.own_items]
        if self.is_root:
            self._collected.extend(own)
        else:
            self._outbox.extend(self._message(BroadcastStage.UP, source=o, value=v, target=parent) for o, v in own)

    def on_round_start(self, round_: int) -> None:
        if round_ == 1 and self.is_root:
            self._join(round_, None, 0)

    def on_receive(self, message: ProtocolMessage, sender: int) -> None:
        stage = message.stage
        me = self.ctx.node_id
        if stage == BroadcastStage.TREE:
            if message.target == me:
                self.children.add(sender)
            elif self.joined_round is None:
                self._tree_candidates.append((sender, int(message.value)))
        elif stage == BroadcastStage.UP and message.target == me:
            if self.is_root:
                self._collected.append((message.source, message.value))
            else:
                self._outbox.append(self._message(BroadcastStage.UP, message.source, message.value, target=self.parent))
        elif stage == BroadcastStage.UP_DONE and message.target == me:
            self.children_done.add(sender)
        elif stage == BroadcastStage.DOWN and sender == self.parent:
            self.store.append((message.source, message.value))
            if self.children:
                self._outbox.append(message)
        elif stage == BroadcastStage.DOWN_DONE and sender == self.parent:
            if self.children:
                self._outbox.append(message)
            self.finished = True

    def _children_known(self, round_: int) -> bool:
        return self.joined_round is not None and round_ >= self.joined_round + 2

    def emit(self) -> Optional[ProtocolMessage]:
        round_ = self.ctx.round
        if self.joined_round is None and self._tree_candidates:
            parent, parent_depth = min(self._tree_candidates)
            self._tree_candidates = []
            self._join(round_, parent, parent_depth + 1)

        subtree_done = (
            self._children_known(round_)
            and self.children_done >= self.children
            and not self._outbox
            and not self.up_done_sent
        )
        if subtree_done:
            self.up_done_sent = True
            if self.is_root:
                self.store = sorted(self._collected)
                if self.children:
                    self._outbox.extend(self._message(BroadcastStage.DOWN, o, v) for o, v in self.store)
                    self._outbox.append(self._message(BroadcastStage.DOWN_DONE))
                self.finished = True
            else:
                return self._message(BroadcastStage.UP_DONE, target=self.parent)

        if self._outbox:
            return self._outbox.popleft()
        return None

    def is_done(self) -> bool:
        if self.joined_round is None:
            return not self.is_root and not self._tree_candidates
        return self.finished and not self._outbox

    def queue_depth(self) -> int:
        return len(self._outbox)

@dataclass
class BroadcastResult:
    stores: List[List[Item]]
    parents: List[Optional[int]]
    tree_depth: int
    metrics: RunMetrics
    roots: List[int] = field(default_factory=lambda: [ROOT])
    transcript: Optional[List[TranscriptEntry]] = None

def pipelined_broadcast(
    graph: Graph,
    items: Mapping[int, Sequence[float]],
    mode: CommunicationMode = CommunicationMode(),
    seed: int = 0,
    round_limit: Optional[int] = None,
    per_component: bool = False,
    record_transcript: bool = False,
) -> BroadcastResult:
    """
    Every node ends up holding all K = Σ|items| (origin, value) pairs, or
    with `per_component` every pair that originates in its own weakly
    connected component.
    """
    if mode.direction != Direction.BIDIRECTIONAL:
        raise UnsupportedModeError("pipelined broadcast requires bidirectional communication")

    n = graph.node_count
    if n == 1:
        store = sorted((ROOT, v) for v in items.get(ROOT, ()))
        return BroadcastResult([store], [None], 0, RunMetrics())

    metrics = RunMetrics()
    transcript: List[TranscriptEntry] = []
    roots = [ROOT]
    if per_component:
        roots, election = elect_component_roots(
            graph, mode=mode, seed=seed, round_limit=round_limit, record_transcript=record_transcript
        )
        metrics.absorb(election.metrics)
        transcript.extend(election.transcript or ())
        logger.debug(f"👑 Component roots: {roots} (elected in {election.metrics.rounds} rounds)")

    root_set = set(roots)
    programs = [PipelinedBroadcastNode(items.get(v, ()), root=v in root_set) for v in range(n)]
    result = run_simulation(graph, programs, mode=mode, seed=seed, round_limit=round_limit, record_transcript=record_transcript)
    transcript.extend(shift_transcript(result.transcript, metrics.rounds))
    metrics.absorb(result.metrics)

    unreached = [v for v, p in enumerate(programs) if p.joined_round is None]
    if unreached:
        logger.error(f"❌ Broadcast could not reach nodes {unreached}")
        raise UnreachableNodesError(unreached)

    depth = max(p.depth for p in programs)
    k = sum(len(v) for v in items.values())
    logger.debug(
        f"📡 Broadcast of {k} items: rounds={metrics.rounds}, roots={len(roots)}, tree depth={depth}, "
        f"bound={settings.PIPELINE_CONSTANT}·(K+D)"
    )
    return BroadcastResult(
        stores=[list(p.store) for p in programs],
        parents=[p.parent for p in programs],
        tree_depth=depth,
        metrics=metrics,
        roots=roots,
        transcript=transcript if record_transcript else None,
    )
