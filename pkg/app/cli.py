"""
Command-line front end.

    gen     write a generated instance
    run     exact APSP, JSON summary on stdout
    bench   scaling trials, CSV on stdout
    verify  diff a distance matrix against the oracle and run the
            distributed self-check
    fb      standalone filtered broadcast, JSON on stdout

Exit codes: 0 ok, 1 error, 2 negative cycle.
"""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence, TextIO

import numpy as np

from app.config import settings
from app.core.engine import CommunicationMode
from app.core.exceptions import CongestException, DimensionMismatchError, InvalidParameterError
from app.core.graph import Graph, dump_graph, generate_random_graph, load_graph
from app.core.logging import setup_logging
from app.services.apsp_service import ApspConfig, run_apsp
from app.services.benchmark_service import run_benchmark, write_bench_csv
from app.services.filtered_broadcast_service import filtered_broadcast
from app.services.oracle_service import oracle_apsp
from app.services.verification_service import las_vegas_verify
from app.utils.constants import Direction, Discipline, ExitCode, IterationPolicy
from app.utils.helpers import format_value, json_value, parse_int_list, parse_key_values, parse_value

logger = logging.getLogger(__name__)

MAX_LISTED_MISMATCHES = 10

# ==========================================
# ARGUMENTOS
# ==========================================

def _add_mode_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--unidirectional", action="store_true", help="communicate along out-arcs only")
    parser.add_argument("--unicast", action="store_true", help="one message per link instead of one per node")

def _add_graph_source(parser: argparse.ArgumentParser, required: bool = True) -> None:
    source = parser.add_mutually_exclusive_group(required=required)
    source.add_argument("--graph", type=Path, help="edge-list file")
    source.add_argument("--gen", help="generator parameters: n=..,p=..,wlo=..,whi=..,int=0|1,zero=..")
    parser.add_argument("--undirected", action="store_true", help="generate an undirected graph")

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="congest-apsp", description=settings.APP_NAME)
    parser.add_argument("--log-level", default=settings.LOG_LEVEL)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="write a generated instance")
    gen.add_argument("--gen", required=True)
    gen.add_argument("--undirected", action="store_true")
    gen.add_argument("--seed", type=int, default=settings.DEFAULT_SEED)
    gen.add_argument("--out", type=Path)

    run = sub.add_parser("run", help="run exact APSP")
    _add_graph_source(run)
    _add_mode_flags(run)
    run.add_argument("--seed", type=int, default=settings.DEFAULT_SEED)
    run.add_argument("--c", type=float, default=settings.DEFAULT_C)
    run.add_argument("--policy", choices=[p.value for p in IterationPolicy], default=IterationPolicy.QUIESCENT.value)
    run.add_argument("--matrix-out", type=Path)
    run.add_argument("--metrics-out", type=Path)
    run.add_argument("--no-verify", action="store_true", help="skip the distributed self-check")

    bench = sub.add_parser("bench", help="scaling trials")
    bench.add_argument("--n-list", default="")
    bench.add_argument("--trials", type=int, default=3)
    bench.add_argument("--gen", default="", help="generator parameters other than n")
    bench.add_argument("--seed", type=int, default=settings.DEFAULT_SEED)
    bench.add_argument("--c", type=float, default=settings.DEFAULT_C)
    bench.add_argument("--workers", type=int, default=settings.BENCH_MAX_WORKERS)
    bench.add_argument("--metrics-out", type=Path)
    _add_mode_flags(bench)

    verify = sub.add_parser("verify", help="check a distance matrix")
    _add_graph_source(verify)
    _add_mode_flags(verify)
    verify.add_argument("--matrix", type=Path, required=True)
    verify.add_argument("--seed", type=int, default=settings.DEFAULT_SEED)

    fb = sub.add_parser("fb", help="standalone filtered broadcast")
    _add_graph_source(fb)
    _add_mode_flags(fb)
    fb.add_argument("--source", type=int, required=True)
    fb.add_argument("--between", required=True, help="comma-separated between-nodes")
    fb.add_argument("--dhat", required=True, help="comma-separated estimates, 'inf' allowed")
    fb.add_argument("--window", type=int)
    fb.add_argument("--seed", type=int, default=settings.DEFAULT_SEED)

    return parser

def _mode(args: argparse.Namespace) -> CommunicationMode:
    return CommunicationMode(
        direction=Direction.UNIDIRECTIONAL if args.unidirectional else Direction.BIDIRECTIONAL,
        discipline=Discipline.UNICAST if args.unicast else Discipline.BROADCAST,
    )

def _generate(params: str, seed: int, directed: bool) -> Graph:
    try:
        values = parse_key_values(params)
        return generate_random_graph(
            int(values["n"]),
            float(values.get("p", 0.2)),
            float(values.get("wlo", 0.0)),
            float(values.get("whi", 100.0)),
            seed=seed,
            directed=directed,
            integer_weights=values.get("int", "1") != "0",
            zero_weight_fraction=float(values.get("zero", 0.0)),
        )
    except KeyError as e:
        raise InvalidParameterError(f"--gen is missing {e}")
    except ValueError as e:
        if isinstance(e, CongestException):
            raise
        raise InvalidParameterError(f"bad --gen parameters: {e}")

def _load_source(args: argparse.Namespace) -> Graph:
    if args.graph is not None:
        with open(args.graph, encoding="utf-8") as f:
            return load_graph(f)
    return _generate(args.gen, args.seed, directed=not args.undirected)

# ==========================================
# MATRICES
# ==========================================

def write_matrix(matrix: np.ndarray, stream: TextIO) -> None:
    for row in matrix:
        stream.write(",".join(format_value(x) for x in row) + "\n")

def read_matrix(path: Path) -> np.ndarray:
    try:
        return np.loadtxt(path, delimiter=",", ndmin=2, dtype=float)
    except ValueError as e:
        raise InvalidParameterError(f"cannot read matrix {path}: {e}")

def _emit(payload: str, path: Optional[Path]) -> None:
    print(payload)
    if path is not None:
        path.write_text(payload + "\n", encoding="utf-8")

# ==========================================
# COMANDOS
# ==========================================

def cmd_gen(args: argparse.Namespace) -> int:
    graph = _generate(args.gen, args.seed, directed=not args.undirected)
    text = dump_graph(graph)
    if args.out is not None:
        args.out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return ExitCode.OK

def cmd_run(args: argparse.Namespace) -> int:
    graph = _load_source(args)
    mode = _mode(args)
    config = ApspConfig(
        c=args.c,
        mode=mode,
        seed=args.seed,
        policy=IterationPolicy(args.policy),
    )
    result = run_apsp(graph, config)

    verified = True
    if not args.no_verify:
        verified = las_vegas_verify(graph, result.distances, mode=mode, seed=args.seed).consistent

    if args.matrix_out is not None:
        with open(args.matrix_out, "w", encoding="utf-8") as f:
            write_matrix(result.distances, f)
    _emit(result.dump(verified).model_dump_json(), args.metrics_out)
    return ExitCode.OK if verified else ExitCode.ERROR

def cmd_bench(args: argparse.Namespace) -> int:
    n_list = parse_int_list(args.n_list)
    if not n_list:
        raise InvalidParameterError("usage: bench --n-list N1,N2,... --trials K")
    params = parse_key_values(args.gen) if args.gen else {}
    rows = run_benchmark(
        n_list,
        args.trials,
        root_seed=args.seed,
        edge_probability=float(params.get("p", 0.2)),
        weight_low=float(params.get("wlo", 0.0)),
        weight_high=float(params.get("whi", 100.0)),
        integer_weights=params.get("int", "1") != "0",
        c=args.c,
        mode=_mode(args),
        workers=args.workers,
    )
    write_bench_csv(rows, sys.stdout)
    if args.metrics_out is not None:
        with open(args.metrics_out, "w", encoding="utf-8") as f:
            write_bench_csv(rows, f)
    return ExitCode.OK

def cmd_verify(args: argparse.Namespace) -> int:
    graph = _load_source(args)
    matrix = read_matrix(args.matrix)
    n = graph.node_count
    if matrix.shape != (n, n):
        raise DimensionMismatchError(f"matrix has shape {matrix.shape}, graph has {n} nodes")

    expected = oracle_apsp(graph)
    differing = np.argwhere(expected != matrix)
    for u, v in differing[:MAX_LISTED_MISMATCHES]:
        print(f"{u},{v},{format_value(expected[u, v])},{format_value(matrix[u, v])}")

    verification = las_vegas_verify(graph, matrix, mode=_mode(args), seed=args.seed)
    agree = len(differing) == 0 and verification.consistent
    print(json.dumps({
        "oracle_mismatches": int(len(differing)),
        "verdict": verification.verdict.value,
        "violating_nodes": verification.violating_nodes,
        "agree": agree,
    }))
    return ExitCode.OK if agree else ExitCode.ERROR

def cmd_fb(args: argparse.Namespace) -> int:
    graph = _load_source(args)
    between = parse_int_list(args.between)
    try:
        estimates = [parse_value(tok) for tok in args.dhat.split(",") if tok.strip()]
    except ValueError as e:
        raise InvalidParameterError(f"bad --dhat: {e}")
    if len(between) != len(estimates):
        raise InvalidParameterError("--between and --dhat must have the same length")

    result = filtered_broadcast(
        graph,
        args.source,
        between,
        dict(zip(between, estimates)),
        oracle_apsp(graph),
        window=args.window,
        mode=_mode(args),
        seed=args.seed,
    )
    print(json.dumps({
        "source": args.source,
        "outputs": [json_value(x) for x in result.outputs],
        "metrics": result.metrics.summary().model_dump(),
    }))
    return ExitCode.OK

COMMANDS = {
    "gen": cmd_gen,
    "run": cmd_run,
    "bench": cmd_bench,
    "verify": cmd_verify,
    "fb": cmd_fb,
}

def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return ExitCode.OK if e.code == 0 else ExitCode.ERROR

    setup_logging(log_level=args.log_level, log_to_file=settings.LOG_TO_FILE, log_dir=settings.LOG_DIR)
    try:
        return int(COMMANDS[args.command](args))
    except CongestException as e:
        print(f"error: {e.detail}", file=sys.stderr)
        return e.exit_code
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return ExitCode.ERROR

if __name__ == "__main__":
    sys.exit(main())
