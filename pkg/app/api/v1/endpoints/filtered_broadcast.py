"""
Endpoint del broadcast filtrado independiente.
"""

from fastapi import APIRouter
import logging

from app.dependencies import resolve_graph, resolve_mode
from app.schemas.apsp import FilteredBroadcastRequest, FilteredBroadcastResponse
from app.services.filtered_broadcast_service import filtered_broadcast
from app.services.oracle_service import oracle_apsp
from app.utils.helpers import INF, json_value


router = APIRouter(prefix="/filtered-broadcast", tags=["filtered-broadcast"])
logger = logging.getLogger(__name__)


@router.post(
    "",
    response_model=FilteredBroadcastResponse,
    summary="Broadcast filtrado",
    description="Calcula en cada nodo min_b dhat(b) + dist(b, v) con el broadcast filtrado aleatorio."
)
def run_filtered_broadcast(request: FilteredBroadcastRequest):
    graph = resolve_graph(request)
    dhat = {b: INF if x is None else x for b, x in zip(request.between, request.dhat)}
    result = filtered_broadcast(
        graph,
        request.source,
        request.between,
        dhat,
        oracle_apsp(graph),
        window=request.window,
        mode=resolve_mode(request),
        seed=request.seed,
        policy=request.policy,
    )
    return FilteredBroadcastResponse(
        source=request.source,
        outputs=[json_value(x) for x in result.outputs],
        metrics=result.metrics.summary(),
    )
