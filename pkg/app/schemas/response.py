# ==========================================
# app/schemas/response.py - Errores y health check
# ==========================================

"""Respuestas comunes a todos los endpoints del simulador"""
from datetime import datetime, timezone
from typing import Any, Dict, Optional

from pydantic import BaseModel, Field

def _utcnow() -> datetime:
    return datetime.now(timezone.utc)

class ErrorResponse(BaseModel):
    """Cuerpo de un CongestException; error = nombre de la clase"""
    success: bool = False
    error: str
    details: Optional[str] = None
    timestamp: datetime = Field(default_factory=_utcnow)

class HealthResponse(BaseModel):
    status: str = "OK"
    timestamp: datetime = Field(default_factory=_utcnow)
    version: str
    environment: str
    settings: Dict[str, Any] = Field(default_factory=dict, description="Constantes efectivas del simulador")
