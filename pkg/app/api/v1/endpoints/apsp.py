"""
Endpoints de APSP.
Ejecutan el algoritmo distribuido sobre un grafo enviado o generado, y
verifican una matriz de distancias enviada.
"""

from fastapi import APIRouter
import logging

import numpy as np

from app.core.exceptions import DimensionMismatchError
from app.dependencies import resolve_graph, resolve_mode
from app.schemas.apsp import (
    ApspRunRequest,
    ApspRunResponse,
    MismatchEntry,
    VerifyRequest,
    VerifyResponse,
)
from app.services.apsp_service import ApspConfig, run_apsp
from app.services.oracle_service import oracle_apsp
from app.services.verification_service import las_vegas_verify
from app.utils.helpers import INF, json_value


router = APIRouter(prefix="/apsp", tags=["apsp"])
logger = logging.getLogger(__name__)

MAX_LISTED_MISMATCHES = 10


@router.post(
    "/run",
    response_model=ApspRunResponse,
    summary="Ejecutar APSP",
    description="Ejecuta el APSP distribuido exacto y devuelve el resumen de rondas y congestión."
)
def run(request: ApspRunRequest):
    """
    Intensivo en CPU: un ensayo por request, atendido de forma síncrona.
    """
    graph = resolve_graph(request)
    mode = resolve_mode(request)
    result = run_apsp(graph, ApspConfig(c=request.c, mode=mode, seed=request.seed, policy=request.policy))

    verified = True
    if request.verify:
        verified = las_vegas_verify(graph, result.distances, mode=mode, seed=request.seed).consistent

    matrix = None
    if request.include_matrix:
        matrix = [[json_value(x) for x in row] for row in result.distances.tolist()]

    return ApspRunResponse(
        result=result.dump(verified),
        phases=result.phases,
        metrics=result.metrics.summary(),
        matrix=matrix,
    )


@router.post(
    "/verify",
    response_model=VerifyResponse,
    summary="Verificar matriz",
    description="Compara una matriz de distancias con el oráculo y ejecuta la verificación distribuida."
)
def verify(request: VerifyRequest):
    graph = resolve_graph(request)
    n = graph.node_count
    matrix = np.array([[INF if x is None else x for x in row] for row in request.matrix], dtype=float)
    if matrix.shape != (n, n):
        raise DimensionMismatchError(f"matrix has shape {matrix.shape}, graph has {n} nodes")

    expected = oracle_apsp(graph)
    differing = np.argwhere(expected != matrix)
    mismatches = [
        MismatchEntry(u=int(u), v=int(v), expected=json_value(expected[u, v]), got=json_value(matrix[u, v]))
        for u, v in differing[:MAX_LISTED_MISMATCHES]
    ]

    verification = las_vegas_verify(graph, matrix, mode=resolve_mode(request), seed=request.seed)
    logger.info(f"🔍 Verify via API: {graph}, mismatches={len(differing)}, verdict={verification.verdict.value}")
    return VerifyResponse(
        oracle_agrees=len(differing) == 0,
        mismatches=mismatches,
        verdict=verification.verdict,
        violating_nodes=verification.violating_nodes,
        metrics=verification.metrics.summary(),
    )
