# ==========================================
# app/schemas/graph.py - Schemas de grafos
# ==========================================

"""Schemas Pydantic para grafos y su generación"""
from pydantic import BaseModel, Field, model_validator
from typing import Optional

class GraphGenerateRequest(BaseModel):
    """Parámetros de generate_random_graph"""
    n: int = Field(..., ge=1)
    p: float = Field(0.2, gt=0, le=1)
    wlo: float = 0.0
    whi: float = 100.0
    seed: int = Field(0, ge=0)
    directed: bool = True
    integer_weights: bool = True
    zero_weight_fraction: float = Field(0.0, ge=0, le=1)

    @model_validator(mode='after')
    def check_weight_range(self):
        if self.wlo > self.whi:
            raise ValueError('wlo must not exceed whi')
        return self

class GraphResponse(BaseModel):
    success: bool = True
    n: int
    m: int
    directed: bool
    graph_text: str

class GraphSource(BaseModel):
    """Un grafo como texto o como parámetros de generación (exclusivos)"""
    graph_text: Optional[str] = None
    generate: Optional[GraphGenerateRequest] = None

    @model_validator(mode='after')
    def check_exclusive(self):
        if (self.graph_text is None) == (self.generate is None):
            raise ValueError('provide exactly one of graph_text or generate')
        return self
