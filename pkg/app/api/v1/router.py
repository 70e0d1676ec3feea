# ==========================================
# app/api/v1/router.py - Router principal v1
# ==========================================

"""Router principal para API v1"""
from fastapi import APIRouter
from datetime import datetime, timezone

from app.api.v1.endpoints import apsp, filtered_broadcast, graphs
from app.config import settings
from app.schemas.response import HealthResponse

# Router principal de la API v1
api_router = APIRouter()

api_router.include_router(graphs.router, tags=["graphs"])
api_router.include_router(apsp.router, tags=["apsp"])
api_router.include_router(filtered_broadcast.router, tags=["filtered-broadcast"])

# Health check endpoint
@api_router.get("/health", response_model=HealthResponse)
async def health_check():
    """Estado del servicio y configuración efectiva del simulador"""
    return HealthResponse(
        status="OK",
        timestamp=datetime.now(timezone.utc),
        version=settings.APP_VERSION,
        environment=settings.ENVIRONMENT,
        settings={
            "default_c": settings.DEFAULT_C,
            "default_seed": settings.DEFAULT_SEED,
            "round_limit_override": settings.CONGEST_APSP_ROUND_LIMIT,
            "pipeline_constant": settings.PIPELINE_CONSTANT,
            "verify_constant": settings.VERIFY_CONSTANT,
            "check_preconditions": settings.CHECK_PRECONDITIONS,
        },
    )
