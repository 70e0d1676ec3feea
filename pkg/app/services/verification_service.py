"""
Las Vegas self-verification of final distance tables.

Every node streams its full distance vector to its neighbors, one
(source, value) entry per round. A receiver v checks that no entry
relaxes its own: d^x(s, x) + w(x, v) < d^v(s, v) is a violation. Nodes
holding a violation flood an alarm afterwards. The check is one-sided:
it finds entries that a relaxation would lower, not underestimates.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from app.core.engine import CommunicationMode, NodeProgram, ProtocolMessage, RunMetrics, run_simulation
from app.core.exceptions import DimensionMismatchError
from app.core.graph import Graph
from app.services.bellman_ford_service import DistanceTable
from app.utils.constants import MessageKind, Verdict, VerifyStage
from app.utils.helpers import INF

logger = logging.getLogger(__name__)

class VerifierNode(NodeProgram):

    def __init__(self, column: Sequence[float]):
        super().__init__()
        self.column = list(column)
        self.violations: List[Tuple[int, int]] = []
        self.heard_alarm = False
        self.alarm_sent = False

    def on_receive(self, message: ProtocolMessage, sender: int) -> None:
        if message.stage == VerifyStage.ALARM:
            self.heard_alarm = True
            return
        weight = self.ctx.in_weights.get(sender)
        if weight is not None and message.value + weight < self.column[message.source]:
            self.violations.append((message.source, sender))

    def _needs_alarm(self) -> bool:
        return (bool(self.violations) or self.heard_alarm) and not self.alarm_sent

    def emit(self) -> Optional[ProtocolMessage]:
        round_ = self.ctx.round
        if round_ <= self.ctx.n:
            source = round_ - 1
            return ProtocolMessage(
                kind=MessageKind.VERIFY,
                source=source,
                value=self.column[source],
                stage=int(VerifyStage.ENTRY),
            )
        if self._needs_alarm():
            self.alarm_sent = True
            return ProtocolMessage(kind=MessageKind.VERIFY, source=self.ctx.node_id, value=0.0, stage=int(VerifyStage.ALARM))
        return None

    def is_done(self) -> bool:
        return self.ctx.round >= self.ctx.n and not self._needs_alarm()

@dataclass
class VerificationResult:
    verdict: Verdict
    violating_nodes: List[int]
    violations: List[Tuple[int, int, int]]
    alarmed_nodes: List[int]
    metrics: RunMetrics = field(default_factory=RunMetrics)

    @property
    def consistent(self) -> bool:
        return self.verdict == Verdict.CONSISTENT

def tables_to_matrix(tables: Sequence[DistanceTable], n: int) -> np.ndarray:
    """matrix[u, v] = d^v(u, v)"""
    matrix = np.full((n, n), INF)
    for table in tables:
        for label, value in table.entries.items():
            matrix[label, table.owner] = value
    return matrix

def las_vegas_verify(
    graph: Graph,
    tables: Union[np.ndarray, Sequence[DistanceTable]],
    mode: CommunicationMode = CommunicationMode(),
    seed: int = 0,
    round_limit: Optional[int] = None,
) -> VerificationResult:
    n = graph.node_count
    matrix = tables if isinstance(tables, np.ndarray) else tables_to_matrix(tables, n)
    if matrix.shape != (n, n):
        raise DimensionMismatchError(f"distance matrix has shape {matrix.shape}, graph has {n} nodes")

    programs = [VerifierNode(matrix[:, v].tolist()) for v in range(n)]
    result = run_simulation(graph, programs, mode=mode, seed=seed, round_limit=round_limit)

    violations = [(v, s, x) for v, p in enumerate(programs) for s, x in p.violations]
    violating = sorted({v for v, _, _ in violations})
    alarmed = [v for v, p in enumerate(programs) if p.alarm_sent or p.heard_alarm]
    verdict = Verdict.VIOLATION if violating else Verdict.CONSISTENT

    log = logger.warning if violating else logger.info
    log(f"🔍 Verification {verdict.value}: rounds={result.metrics.rounds}, violating={violating[:10]}")
    return VerificationResult(verdict, violating, violations, alarmed, result.metrics)
