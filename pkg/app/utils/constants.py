# ==========================================
# app/utils/constants.py - Constantes de la aplicación
# ==========================================

"""Constantes utilizadas en toda la aplicación"""
from enum import Enum, IntEnum

# Sentinela de "sin etiqueta": campo between sin usar, target de broadcast
NO_NODE = -1

# Etiqueta del nodo virtual s* en el modo Johnson
VIRTUAL_SOURCE = -1

# Modos de comunicación
class Direction(str, Enum):
    UNIDIRECTIONAL = "unidirectional"
    BIDIRECTIONAL = "bidirectional"

class Discipline(str, Enum):
    BROADCAST = "broadcast"
    UNICAST = "unicast"

# Tipos de mensaje en el cable
class MessageKind(str, Enum):
    BF_RELAX = "BF_RELAX"
    FB_OFFER = "FB_OFFER"
    BCAST = "BCAST"
    VERIFY = "VERIFY"

# Tipos de instancia del planificador
class InstanceKind(str, Enum):
    BF = "BF"
    FB = "FB"
    BCAST = "BCAST"

# Fronteras de iteración del filtered broadcast
class IterationPolicy(str, Enum):
    FIXED = "fixed"
    QUIESCENT = "quiescent"

# Etapas del broadcast en pipeline
class BroadcastStage(IntEnum):
    TREE = 1
    UP = 2
    UP_DONE = 3
    DOWN = 4
    DOWN_DONE = 5
    ELECT = 6

# Etapas de la verificación Las Vegas
class VerifyStage(IntEnum):
    ENTRY = 0
    ALARM = 1

class Verdict(str, Enum):
    CONSISTENT = "CONSISTENT"
    VIOLATION = "VIOLATION"

# Códigos de salida del CLI
class ExitCode(IntEnum):
    OK = 0
    ERROR = 1
    NEGATIVE_CYCLE = 2

# Cabeceras de los CSV (orden estable)
TRANSCRIPT_HEADER = ("round", "from", "to", "kind", "source", "between", "value", "instance", "iteration")
BENCH_HEADER = ("n", "seed", "rounds", "max_node_congestion", "normalized_rounds")
