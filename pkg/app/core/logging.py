# ==========================================
# app/core/logging.py - Configuración de logging
# ==========================================

"""
Logging del simulador.

Consola a stderr (stdout es de los resultados JSON/CSV del CLI). Con
archivos habilitados, el motor de rondas y el planificador escriben en su
propio archivo porque en DEBUG generan una línea por ronda.
"""
import logging
import logging.handlers
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, List, Optional

MB = 1024 * 1024

# Loggers que van a simulation.log en vez del root
SIMULATION_LOGGERS = ("app.core.engine", "app.services.scheduler_service")

# Librerías externas demasiado habladoras
QUIET_LIBRARIES = {
    "uvicorn.access": logging.WARNING,
    "uvicorn.error": logging.INFO,
    "fastapi": logging.INFO,
    "httpx": logging.WARNING,
}

FILE_FORMAT = logging.Formatter(
    fmt="%(asctime)s | %(name)-36s | %(levelname)-8s | %(filename)s:%(lineno)d | %(message)s",
    datefmt="%Y-%m-%d %H:%M:%S",
)
CONSOLE_FORMAT = logging.Formatter(fmt="%(asctime)s | %(levelname)-8s | %(message)s", datefmt="%H:%M:%S")

def _rotating(path: Path, level: int, max_mb: int, backups: int) -> logging.Handler:
    handler = logging.handlers.RotatingFileHandler(
        filename=path, maxBytes=max_mb * MB, backupCount=backups, encoding="utf-8"
    )
    handler.setFormatter(FILE_FORMAT)
    handler.setLevel(level)
    return handler

def _attach_files(log_dir: Path, level: int, root: logging.Logger) -> List[Path]:
    log_dir.mkdir(parents=True, exist_ok=True)

    app_log = log_dir / "app.log"
    simulation_log = log_dir / "simulation.log"
    error_log = log_dir / "errors.log"

    root.addHandler(_rotating(app_log, logging.DEBUG, max_mb=50, backups=5))
    errors = _rotating(error_log, logging.ERROR, max_mb=10, backups=5)
    root.addHandler(errors)

    simulation = _rotating(simulation_log, logging.DEBUG, max_mb=100, backups=3)
    for name in SIMULATION_LOGGERS:
        sim_logger = logging.getLogger(name)
        sim_logger.handlers.clear()
        sim_logger.addHandler(simulation)
        sim_logger.addHandler(errors)
        sim_logger.setLevel(level)
        sim_logger.propagate = False

    return [app_log, simulation_log, error_log]

def _mark_files(paths: Iterable[Path], logger: logging.Logger) -> None:
    stamp = datetime.now(timezone.utc).isoformat()
    for path in paths:
        try:
            with open(path, "a", encoding="utf-8") as f:
                f.write(f"# Log initialized at {stamp}\n")
            logger.debug(f"   ✅ {path.name} - OK")
        except OSError as e:
            logger.error(f"   ❌ {path.name} - Error: {e}")

def setup_logging(log_level: str = "INFO", log_to_file: bool = False, log_dir: Optional[str] = None) -> None:
    """Configurar el root logger; se puede llamar varias veces (CLI y API)"""
    level = getattr(logging, log_level.upper(), logging.INFO)
    root = logging.getLogger()
    root.setLevel(level)

    # Limpiar handlers existentes para evitar duplicados
    for handler in root.handlers[:]:
        root.removeHandler(handler)
    for name in SIMULATION_LOGGERS:
        sim_logger = logging.getLogger(name)
        sim_logger.handlers.clear()
        sim_logger.propagate = True

    console = logging.StreamHandler(sys.stderr)
    console.setFormatter(CONSOLE_FORMAT)
    console.setLevel(level)
    root.addHandler(console)

    files: List[Path] = []
    if log_to_file:
        files = _attach_files(Path(log_dir or "logs"), level, root)

    for name, quiet_level in QUIET_LIBRARIES.items():
        logging.getLogger(name).setLevel(quiet_level)

    logger = logging.getLogger(__name__)
    logger.debug("🔧 Logging system initialized")
    logger.debug(f"📊 Log Level: {log_level}")
    logger.debug(f"📁 Log to File: {log_to_file}")
    if files:
        logger.debug(f"📂 Log Directory: {files[0].parent.absolute()}")
        _mark_files(files, logger)
