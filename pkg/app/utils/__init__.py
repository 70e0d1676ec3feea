# ==========================================
# app/utils/__init__.py
# ==========================================

"""
Módulo de utilidades del simulador

Exporta las funciones más comúnmente utilizadas
"""

from .helpers import (
    INF,
    ceil_log2,
    default_round_limit,
    format_value,
    parse_value,
    json_value,
    parse_int_list,
    parse_key_values,
)

from .constants import (
    NO_NODE,
    VIRTUAL_SOURCE,
    Direction,
    Discipline,
    MessageKind,
    InstanceKind,
    IterationPolicy,
    Verdict,
    ExitCode,
)

__all__ = [
    # Valores extendidos
    'INF',
    'format_value',
    'parse_value',
    'json_value',

    # Logaritmos y límites
    'ceil_log2',
    'default_round_limit',

    # Parsing de flags
    'parse_int_list',
    'parse_key_values',

    # Constantes
    'NO_NODE',
    'VIRTUAL_SOURCE',
    'Direction',
    'Discipline',
    'MessageKind',
    'InstanceKind',
    'IterationPolicy',
    'Verdict',
    'ExitCode',
]
