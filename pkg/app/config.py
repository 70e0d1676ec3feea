"""Configuración de la aplicación usando Pydantic Settings"""
from pydantic_settings import BaseSettings
from pydantic import field_validator
from typing import Optional

from app.utils.helpers import default_round_limit

class Settings(BaseSettings):
    """Configuración centralizada"""

    # Aplicación
    APP_NAME: str = "Congest APSP Simulator"
    APP_VERSION: str = "1.0.0"
    DEBUG: bool = False
    ENVIRONMENT: str = "production"

    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_TO_FILE: bool = False
    LOG_DIR: str = "logs"

    # Motor de simulación
    CONGEST_APSP_ROUND_LIMIT: Optional[int] = None  # None -> 64·n·⌈log₂ n⌉⁴
    TRANSCRIPT_MAX_ENTRIES: int = 5_000_000

    # Algoritmo
    DEFAULT_C: float = 4.0
    DEFAULT_SEED: int = 0

    # Constantes calibradas (congeladas)
    PIPELINE_CONSTANT: int = 6
    VERIFY_CONSTANT: int = 3

    # "Test builds": verificar precondiciones caras contra el oráculo
    CHECK_PRECONDITIONS: bool = False

    # Benchmark
    BENCH_MAX_WORKERS: int = 1

    @field_validator('CONGEST_APSP_ROUND_LIMIT')
    @classmethod
    def validate_round_limit(cls, v):
        """El límite de rondas, si se define, debe ser positivo"""
        if v is not None and v <= 0:
            raise ValueError('CONGEST_APSP_ROUND_LIMIT must be a positive integer')
        return v

    @field_validator('DEFAULT_C')
    @classmethod
    def validate_c(cls, v):
        if v <= 0:
            raise ValueError('DEFAULT_C must be positive')
        return v

    @field_validator('PIPELINE_CONSTANT', 'VERIFY_CONSTANT', 'BENCH_MAX_WORKERS', 'TRANSCRIPT_MAX_ENTRIES')
    @classmethod
    def validate_positive(cls, v):
        if v <= 0:
            raise ValueError('value must be positive')
        return v

    def round_limit_for(self, n: int) -> int:
        """Límite de rondas efectivo para un grafo de n nodos"""
        if self.CONGEST_APSP_ROUND_LIMIT is not None:
            return self.CONGEST_APSP_ROUND_LIMIT
        return default_round_limit(n)

    class Config:
        env_file = ".env"
        case_sensitive = True

settings = Settings()
