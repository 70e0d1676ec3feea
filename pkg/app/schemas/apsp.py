# ==========================================
# app/schemas/apsp.py - Schemas de APSP y filtered broadcast
# ==========================================

"""Schemas Pydantic para resultados y peticiones de APSP"""
from pydantic import BaseModel, Field, model_validator
from typing import List, Optional

from app.schemas.graph import GraphSource
from app.schemas.metrics import RunMetricsSummary
from app.utils.constants import Direction, Discipline, IterationPolicy, Verdict

class PhaseReport(BaseModel):
    """Costo de una fase i"""
    i: int
    sources: int
    between: int
    hop_depth: int
    bf_rounds: int
    fb_rounds: int
    rounds: int

class ApspResultDump(BaseModel):
    """Volcado JSON de una ejecución (orden de campos estable)"""
    n: int
    seed: int
    mode: str
    c: float
    rounds_total: int
    rounds_per_phase: List[int]
    max_node_congestion: int
    verified: bool

class ModeOptions(BaseModel):
    """Modo de comunicación"""
    direction: Direction = Direction.BIDIRECTIONAL
    discipline: Discipline = Discipline.BROADCAST

# ==========================================
# PETICIONES / RESPUESTAS HTTP
# ==========================================

class ApspRunRequest(GraphSource, ModeOptions):
    seed: int = Field(0, ge=0)
    c: float = Field(4.0, gt=0)
    policy: IterationPolicy = IterationPolicy.QUIESCENT
    verify: bool = True
    include_matrix: bool = False

class ApspRunResponse(BaseModel):
    success: bool = True
    result: ApspResultDump
    phases: List[PhaseReport]
    metrics: RunMetricsSummary
    matrix: Optional[List[List[Optional[float]]]] = None  # null = ∞

class VerifyRequest(GraphSource, ModeOptions):
    seed: int = Field(0, ge=0)
    matrix: List[List[Optional[float]]]  # null = ∞

class MismatchEntry(BaseModel):
    u: int
    v: int
    expected: Optional[float]
    got: Optional[float]

class VerifyResponse(BaseModel):
    success: bool = True
    oracle_agrees: bool
    mismatches: List[MismatchEntry]
    verdict: Verdict
    violating_nodes: List[int]
    metrics: RunMetricsSummary

class FilteredBroadcastRequest(GraphSource, ModeOptions):
    seed: int = Field(0, ge=0)
    source: int = Field(..., ge=0)
    between: List[int]
    dhat: List[Optional[float]]  # null = ∞
    window: Optional[int] = Field(None, gt=0)
    policy: IterationPolicy = IterationPolicy.FIXED

    @model_validator(mode='after')
    def check_lengths(self):
        if len(self.between) != len(self.dhat):
            raise ValueError('between and dhat must have the same length')
        return self

class FilteredBroadcastResponse(BaseModel):
    success: bool = True
    source: int
    outputs: List[Optional[float]]  # null = ∞
    metrics: RunMetricsSummary
