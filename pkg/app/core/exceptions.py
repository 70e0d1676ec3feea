"""Excepciones customizadas"""
from typing import Any, Optional, Sequence

from app.utils.constants import ExitCode

class CongestException(Exception):
    """Excepción base del simulador"""
    status_code: int = 400
    exit_code: int = ExitCode.ERROR

    def __init__(self, detail: str):
        self.detail = detail
        super().__init__(detail)

# ==========================================
# GRAFOS
# ==========================================

class GraphParseError(CongestException):
    status_code = 422

    def __init__(self, detail: str, line: Optional[int] = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(f"{prefix}{detail}")

class NodeIdOutOfRangeError(GraphParseError):
    def __init__(self, node: Any, node_count: int, line: Optional[int] = None):
        self.node = node
        self.node_count = node_count
        super().__init__(f"node id {node} out of range [0, {node_count - 1}]", line=line)

class InvalidParameterError(CongestException, ValueError):
    status_code = 422

class NegativeWeightError(CongestException):
    status_code = 422

    def __init__(self, edge: Optional[tuple] = None, detail: Optional[str] = None):
        self.edge = edge
        super().__init__(detail or f"negative weight on edge {edge}; operation requires non-negative weights")

class NegativeCycleError(CongestException):
    status_code = 409
    exit_code = ExitCode.NEGATIVE_CYCLE

    def __init__(self, cycle: Sequence[int], witness: Optional[int] = None):
        self.cycle = list(cycle)
        self.witness = witness if witness is not None else (self.cycle[0] if self.cycle else None)
        super().__init__(f"negative cycle detected: {' -> '.join(map(str, self.cycle))}")

# ==========================================
# MOTOR / PLANIFICADOR
# ==========================================

class RoundLimitExceededError(CongestException):
    status_code = 500

    def __init__(self, round_limit: int, metrics: Any = None, detail: Optional[str] = None):
        self.round_limit = round_limit
        self.metrics = metrics
        super().__init__(detail or f"round limit {round_limit} exceeded")

class QueueStarvationError(RoundLimitExceededError):
    def __init__(self, instance_id: int, round_limit: int, metrics: Any = None):
        self.instance_id = instance_id
        super().__init__(
            round_limit,
            metrics,
            detail=f"instance {instance_id} still has queued messages after {round_limit} rounds",
        )

class MessageDisciplineError(CongestException):
    status_code = 500

    def __init__(self, node: int, round_: int, detail: str = "attempted a second emission in one slot"):
        self.node = node
        self.round = round_
        super().__init__(f"node {node}, round {round_}: {detail}")

class UnreachableNodesError(CongestException):
    status_code = 422

    def __init__(self, nodes: Sequence[int]):
        self.nodes = sorted(nodes)
        super().__init__(f"nodes unreachable from the broadcast root: {self.nodes}")

class UnsupportedModeError(CongestException):
    status_code = 422

class PreconditionViolationError(CongestException):
    status_code = 422

class DimensionMismatchError(CongestException):
    status_code = 422
