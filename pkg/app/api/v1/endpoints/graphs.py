"""
Endpoint de generación de grafos.
"""

from fastapi import APIRouter
import logging

from app.core.graph import dump_graph
from app.dependencies import build_graph
from app.schemas.graph import GraphGenerateRequest, GraphResponse


router = APIRouter(prefix="/graphs", tags=["graphs"])
logger = logging.getLogger(__name__)


@router.post(
    "/generate",
    response_model=GraphResponse,
    summary="Generar grafo",
    description="Genera un grafo aleatorio reproducible y lo devuelve en formato de lista de aristas."
)
def generate_graph(request: GraphGenerateRequest):
    graph = build_graph(request)
    logger.info(f"🎲 Graph generated via API: {graph}")
    return GraphResponse(
        n=graph.node_count,
        m=graph.edge_count,
        directed=graph.directed,
        graph_text=dump_graph(graph),
    )
