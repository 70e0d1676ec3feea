"""
Benchmark trials for the `bench` command.

Each trial generates its own graph and runs APSP with a fresh engine, so
trials can run in worker processes. Rows come back ordered by (n, seed)
whatever the completion order.
"""
import csv
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, TextIO

import numpy as np

from app.config import settings
from app.core.engine import CommunicationMode
from app.core.exceptions import InvalidParameterError
from app.core.graph import generate_random_graph
from app.core.randomness import RandomStreams, StreamPurpose
from app.services.apsp_service import ApspConfig, run_apsp
from app.utils.constants import BENCH_HEADER

logger = logging.getLogger(__name__)

@dataclass(frozen=True)
class TrialSpec:
    n: int
    seed: int
    edge_probability: float = 0.2
    weight_low: float = 0.0
    weight_high: float = 100.0
    integer_weights: bool = True
    c: float = 4.0
    mode: CommunicationMode = field(default_factory=CommunicationMode)

@dataclass(frozen=True)
class BenchRow:
    n: int
    seed: int
    rounds: int
    max_node_congestion: int
    normalized_rounds: float

    def as_record(self) -> List[object]:
        return [self.n, self.seed, self.rounds, self.max_node_congestion, f"{self.normalized_rounds:.6g}"]

def normalized_rounds(rounds: int, n: int) -> float:
    """rounds / (n · ln⁴ n); 0 for n ≤ 1"""
    if n <= 1:
        return 0.0
    return rounds / (n * math.log(n) ** 4)

def trial_seeds(root_seed: int, trials: int) -> List[int]:
    streams = RandomStreams(root_seed)
    return [streams.derive_seed(StreamPurpose.TRIALS, t) for t in range(trials)]

def run_trial(trial: TrialSpec) -> BenchRow:
    graph = generate_random_graph(
        trial.n,
        trial.edge_probability,
        trial.weight_low,
        trial.weight_high,
        seed=trial.seed,
        integer_weights=trial.integer_weights,
    )
    result = run_apsp(graph, ApspConfig(c=trial.c, mode=trial.mode, seed=trial.seed))
    return BenchRow(
        n=trial.n,
        seed=trial.seed,
        rounds=result.metrics.rounds,
        max_node_congestion=result.metrics.max_node_congestion,
        normalized_rounds=normalized_rounds(result.metrics.rounds, trial.n),
    )

def run_benchmark(
    n_list: Sequence[int],
    trials: int,
    root_seed: int = 0,
    edge_probability: float = 0.2,
    weight_low: float = 0.0,
    weight_high: float = 100.0,
    integer_weights: bool = True,
    c: Optional[float] = None,
    mode: CommunicationMode = CommunicationMode(),
    workers: Optional[int] = None,
) -> List[BenchRow]:
    if not n_list:
        raise InvalidParameterError("bench requires a non-empty n list")
    if trials < 1:
        raise InvalidParameterError(f"trials must be positive, got {trials}")
    if any(n < 1 for n in n_list):
        raise InvalidParameterError(f"every n must be positive, got {list(n_list)}")

    c = settings.DEFAULT_C if c is None else c
    workers = settings.BENCH_MAX_WORKERS if workers is None else workers
    seeds = trial_seeds(root_seed, trials)
    queue = [
        TrialSpec(n, s, edge_probability, weight_low, weight_high, integer_weights, c, mode)
        for n in sorted(set(n_list))
        for s in seeds
    ]
    logger.info(f"📊 Benchmark: n={sorted(set(n_list))}, trials={trials}, workers={workers}")

    if workers <= 1:
        rows = [run_trial(trial) for trial in queue]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(run_trial, queue))

    rows.sort(key=lambda row: (row.n, row.seed))
    logger.info(f"📈 Median normalized rounds per n: {median_normalized(rows)}")
    return rows

def write_bench_csv(rows: Sequence[BenchRow], stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(BENCH_HEADER)
    writer.writerows(row.as_record() for row in rows)

def median_normalized(rows: Sequence[BenchRow]) -> Dict[int, float]:
    """n -> median normalized_rounds"""
    grouped: Dict[int, List[float]] = {}
    for row in rows:
        grouped.setdefault(row.n, []).append(row.normalized_rounds)
    return {n: float(np.median(values)) for n, values in grouped.items()}
