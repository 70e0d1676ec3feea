"""
API HTTP del simulador CONGEST.

El logging se configura antes de importar los routers para que los
loggers de los servicios hereden los handlers desde el primer import.
"""
import logging
import os

from app.core.logging import setup_logging

setup_logging(
    log_level=os.getenv("LOG_LEVEL", "INFO"),
    log_to_file=os.getenv("LOG_TO_FILE", "false").lower() == "true",
    log_dir=os.getenv("LOG_DIR"),
)

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from app.api.v1.router import api_router
from app.config import settings
from app.core.exceptions import CongestException
from app.schemas.response import ErrorResponse

logger = logging.getLogger(__name__)

async def congest_exception_handler(request: Request, exc: CongestException) -> JSONResponse:
    """Errores de dominio -> JSON con su status_code"""
    log = logger.error if exc.status_code >= 500 else logger.warning
    log(f"⚠️  {type(exc).__name__} on {request.url.path}: {exc.detail}")
    body = ErrorResponse(error=type(exc).__name__, details=exc.detail)
    return JSONResponse(status_code=exc.status_code, content=body.model_dump(mode="json"))

async def log_simulator_settings():
    limit = settings.CONGEST_APSP_ROUND_LIMIT or "64·n·⌈log₂ n⌉⁴"
    logger.info(f"🚀 {settings.APP_NAME} v{settings.APP_VERSION} ({settings.ENVIRONMENT})")
    logger.info(f"   • c={settings.DEFAULT_C}, seed={settings.DEFAULT_SEED}, round limit={limit}")
    if settings.CHECK_PRECONDITIONS:
        logger.warning("🧪 Precondition checks against the oracle are ON (slow)")

def create_application() -> FastAPI:
    app = FastAPI(
        title=settings.APP_NAME,
        version=settings.APP_VERSION,
        debug=settings.DEBUG,
        docs_url="/docs" if settings.DEBUG else None,
        redoc_url="/redoc" if settings.DEBUG else None,
    )
    app.add_exception_handler(CongestException, congest_exception_handler)
    app.include_router(api_router, prefix="/api/v1")
    app.add_event_handler("startup", log_simulator_settings)
    logger.debug("✅ FastAPI application ready")
    return app

app = create_application()

@app.get("/")
async def root():
    return {"message": settings.APP_NAME, "version": settings.APP_VERSION, "status": "running"}
