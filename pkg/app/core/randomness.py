"""
Flujos aleatorios por nodo y por propósito.

Una semilla raíz se expande con un PRNG basado en contador (Philox) en
flujos independientes identificados por (propósito, claves...). Añadir
instrumentación que consuma un flujo nunca altera otro.
"""
from enum import IntEnum
from typing import Iterable

import numpy as np

from app.core.exceptions import InvalidParameterError

class StreamPurpose(IntEnum):
    GRAPH = 1
    LEVELS = 2
    BETWEEN = 3
    DELAYS = 4
    TRIALS = 5
    FAULTS = 6

def _entropy(seed: int, purpose: int, keys: Iterable[int]) -> list:
    entropy = [seed, int(purpose)]
    for key in keys:
        key = int(key)
        if key < 0:
            raise InvalidParameterError(f"stream keys must be non-negative, got {key}")
        entropy.append(key)
    return entropy

class RandomStreams:
    """Fábrica determinista de generadores numpy"""

    def __init__(self, seed: int):
        seed = int(seed)
        if seed < 0 or seed >= 2 ** 64:
            raise InvalidParameterError(f"seed must be an unsigned 64-bit integer, got {seed}")
        self.seed = seed

    def generator(self, purpose: StreamPurpose, *keys: int) -> np.random.Generator:
        sequence = np.random.SeedSequence(_entropy(self.seed, purpose, keys))
        return np.random.Generator(np.random.Philox(sequence))

    def derive_seed(self, purpose: StreamPurpose, *keys: int) -> int:
        """Semilla hija de 64 bits, estable entre plataformas"""
        sequence = np.random.SeedSequence(_entropy(self.seed, purpose, keys))
        return int(sequence.generate_state(1, dtype=np.uint64)[0])

    def __repr__(self) -> str:
        return f"RandomStreams(seed={self.seed})"
