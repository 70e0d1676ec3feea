import csv
import io
import math

import pytest

from app.core.exceptions import InvalidParameterError
from app.services.benchmark_service import (
    BenchRow,
    median_normalized,
    normalized_rounds,
    run_benchmark,
    trial_seeds,
    write_bench_csv,
)
from app.utils.constants import BENCH_HEADER

def test_normalized_rounds():
    assert normalized_rounds(100, 1) == 0.0
    assert normalized_rounds(0, 64) == 0.0
    assert normalized_rounds(64 * math.log(64) ** 4, 64) == pytest.approx(1.0)

def test_trial_seeds_are_stable():
    assert trial_seeds(7, 3) == trial_seeds(7, 3)
    assert len(set(trial_seeds(7, 5))) == 5
    assert trial_seeds(7, 2) == trial_seeds(7, 5)[:2]

def test_rows_ordered_by_n_then_seed():
    rows = run_benchmark([8, 5], trials=3, root_seed=1, edge_probability=0.4, workers=1)
    assert len(rows) == 6
    assert [r.n for r in rows] == [5, 5, 5, 8, 8, 8]
    assert [r.seed for r in rows[:3]] == sorted(trial_seeds(1, 3))
    assert all(r.rounds > 0 for r in rows)
    assert rows == run_benchmark([5, 8], trials=3, root_seed=1, edge_probability=0.4, workers=1)

@pytest.mark.parametrize("kwargs", [
    dict(n_list=[], trials=1),
    dict(n_list=[4], trials=0),
    dict(n_list=[0, 4], trials=1),
])
def test_rejects_bad_parameters(kwargs):
    with pytest.raises(InvalidParameterError):
        run_benchmark(**kwargs)

def test_csv_output():
    rows = [BenchRow(16, 3, 120, 4, 0.5), BenchRow(32, 3, 300, 6, 0.0123456789)]
    buffer = io.StringIO()
    write_bench_csv(rows, buffer)
    lines = buffer.getvalue().splitlines()
    assert lines[0] == ",".join(BENCH_HEADER)
    assert lines[1] == "16,3,120,4,0.5"
    assert lines[2] == "32,3,300,6,0.0123457"

def test_csv_output_parses_back_with_csv_reader():
    rows = run_benchmark([5], trials=2, root_seed=3, edge_probability=0.5, workers=1)
    buffer = io.StringIO()
    write_bench_csv(rows, buffer)
    records = list(csv.DictReader(io.StringIO(buffer.getvalue())))
    assert tuple(records[0].keys()) == BENCH_HEADER
    assert [(int(r["n"]), int(r["seed"]), int(r["rounds"])) for r in records] == [(r.n, r.seed, r.rounds) for r in rows]
    assert [float(r["normalized_rounds"]) for r in records] == [pytest.approx(r.normalized_rounds, rel=1e-5) for r in rows]

def test_median_normalized():
    rows = [BenchRow(16, s, 0, 0, x) for s, x in enumerate([0.1, 0.3, 0.2])] + [BenchRow(32, 0, 0, 0, 0.4)]
    assert median_normalized(rows) == {16: pytest.approx(0.2), 32: pytest.approx(0.4)}
