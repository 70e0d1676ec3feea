# ==========================================
# app/utils/helpers.py - Funciones auxiliares generales
# ==========================================

"""Funciones auxiliares y utilidades generales"""
import math
from typing import Dict, List, Optional

INF = math.inf

# ==========================================
# LOGARITMOS
# ==========================================

def ceil_log2(n: int) -> int:
    """⌈log₂ n⌉ para n ≥ 1 (0 cuando n = 1)"""
    if n < 1:
        raise ValueError(f"ceil_log2 requires n >= 1, got {n}")
    return (n - 1).bit_length()

def default_round_limit(n: int) -> int:
    """64 · n · max(1, ⌈log₂ n⌉)⁴"""
    log_n = max(1, ceil_log2(max(n, 1)))
    return 64 * max(n, 1) * log_n ** 4

# ==========================================
# VALORES EXTENDIDOS (con +∞)
# ==========================================

def format_value(value: float) -> str:
    """Formatear un real extendido: 'inf', entero si es exacto, o repr"""
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if float(value).is_integer():
        return str(int(value))
    return repr(float(value))

def parse_value(token: str) -> float:
    """Parsear un real extendido ('inf' permitido)"""
    token = token.strip()
    if token.lower() in ("inf", "+inf", "infinity", "∞"):
        return INF
    return float(token)

def json_value(value: float) -> Optional[float]:
    """JSON no tiene ∞: se serializa como null"""
    if math.isinf(value):
        return None
    return float(value)

def parse_int_list(text: Optional[str]) -> List[int]:
    """'1,2,3' -> [1, 2, 3]; vacío -> []"""
    if text is None:
        return []
    return [int(tok) for tok in text.split(",") if tok.strip()]

def parse_key_values(text: str) -> Dict[str, str]:
    """'n=32,p=0.2' -> {'n': '32', 'p': '0.2'}"""
    result: Dict[str, str] = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise ValueError(f"expected key=value, got '{part}'")
        key, value = part.split("=", 1)
        result[key.strip()] = value.strip()
    return result
