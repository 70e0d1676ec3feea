# ==========================================
# app/schemas/metrics.py - Schemas de métricas de ejecución
# ==========================================

"""Schemas Pydantic para métricas de una simulación"""
from pydantic import BaseModel

class RunMetricsSummary(BaseModel):
    """Resumen serializable de RunMetrics"""
    rounds: int
    messages_total: int
    max_node_congestion: int
    max_edge_load: int
    max_queue_depth: int
