"""Command-line driver: preprocess a graph, apply one update batch, answer queries.

Exit codes: 0 success, 1 bad input or arguments, 2 singular matrix or
broken invariant, 3 mismatch against the reference checker (``--verify``).
"""

from __future__ import annotations

import argparse
import csv
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, TextIO

from .algebra.field import FieldConfig
from .algebra.kernels import OpCounter, counting, paused
from .errors import ConfigurationError, InvariantError, ParseError, SingularMatrixError
from .formats import read_graph, read_queries, read_updates
from .graphoracle import (
    Dist,
    NegativeCycle,
    QueryAnswer,
    Reach,
    Unreachable,
    build_distance_oracle,
    build_reach_oracle,
)
from .refcheck import NegativeCycleDetected, RefGraph, bellman_ford_all, bfs_reach

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_ALGEBRA = 2
EXIT_MISMATCH = 3

BENCH_FIELDS = ("phase", "n", "f", "mu", "field_ops", "wall_ms")


@dataclass(frozen=True)
class RunConfig:
    mode: str
    mu: float
    seed: int
    prime: int | None
    graph: Path
    updates: Path
    queries: Path
    verify: bool = False
    bench: Path | None = None

    def __post_init__(self) -> None:
        if self.mode not in ("distance", "reach"):
            raise ConfigurationError(f"mode must be 'distance' or 'reach', got {self.mode!r}")
        if not 0.0 <= self.mu <= 1.0:
            raise ConfigurationError(f"mu must lie in [0, 1], got {self.mu}")
        if not 0 <= self.seed < 1 << 64:
            raise ConfigurationError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.prime is not None:
            FieldConfig.from_prime(self.prime)


@dataclass(frozen=True)
class BenchRow:
    phase: str
    n: int
    f: int
    mu: float
    field_ops: int
    wall_ms: float


def format_answer(answer: QueryAnswer, u: int, v: int) -> str:
    if isinstance(answer, NegativeCycle):
        return "negcycle"
    if isinstance(answer, Unreachable):
        return f"dist {u} {v} inf"
    if isinstance(answer, Dist):
        return f"dist {u} {v} {answer.k}"
    assert isinstance(answer, Reach)
    return f"reach {u} {v} {'true' if answer.flag else 'false'}"


class _Phase:
    def __init__(self, name: str, rows: list[BenchRow], n: int, f: int, mu: float):
        self.name, self.rows, self.n, self.f, self.mu = name, rows, n, f, mu
        self.counter = OpCounter()

    def __enter__(self) -> _Phase:
        self._ctx = counting(self.counter)
        self._ctx.__enter__()
        self._start = time.perf_counter()
        return self

    def __exit__(self, *exc) -> None:
        wall = (time.perf_counter() - self._start) * 1000.0
        self._ctx.__exit__(*exc)
        self.rows.append(BenchRow(self.name, self.n, self.f, self.mu, self.counter.ops, wall))


def _reference_answers(config: RunConfig, graph: RefGraph, queries: list[tuple[int, int]]) -> list[QueryAnswer]:
    out: list[QueryAnswer] = []
    cache: dict[int, object] = {}
    for u, v in queries:
        if config.mode == "reach":
            out.append(Reach(bfs_reach(graph, u, v)))
            continue
        if u not in cache:
            cache[u] = bellman_ford_all(graph, u)
        dist = cache[u]
        if isinstance(dist, NegativeCycleDetected):
            out.append(NegativeCycle())
        elif dist[v - 1] is None:  # type: ignore[index]
            out.append(Unreachable())
        else:
            out.append(Dist(dist[v - 1]))  # type: ignore[index]
    return out


def run_pipeline(config: RunConfig) -> tuple[list[str], int, list[BenchRow], list[str]]:
    """Run one preprocess, update and query pass.

    Returns the output lines, the exit code, benchmark rows and diagnostics.
    Input and algebra errors propagate to the caller.
    """
    spec = read_graph(config.graph)
    batch = read_updates(config.updates, spec, config.mode)
    queries = read_queries(config.queries, spec.n)
    rows: list[BenchRow] = []
    f = len(batch)
    with _Phase("preprocess", rows, spec.n, f, config.mu):
        if config.mode == "distance":
            oracle = build_distance_oracle(spec, config.mu, config.seed, prime=config.prime)
        else:
            oracle = build_reach_oracle(spec, config.seed, prime=config.prime)
    with _Phase("update", rows, spec.n, f, config.mu):
        oracle.update(batch)
    with _Phase("query", rows, spec.n, f, config.mu):
        answers = [oracle.query(u, v) for u, v in queries]
    lines = [format_answer(a, u, v) for a, (u, v) in zip(answers, queries)]
    code = EXIT_OK
    notes: list[str] = []
    if config.verify:
        with paused():
            expected = _reference_answers(config, RefGraph.from_spec(spec, batch), queries)
        for (u, v), got, want in zip(queries, answers, expected):
            if got != want:
                notes.append(f"mismatch for {u} {v}: got {format_answer(got, u, v)!r}, "
                             f"expected {format_answer(want, u, v)!r}")
        if notes:
            code = EXIT_MISMATCH
    return lines, code, rows, notes


def write_bench(rows: Sequence[BenchRow], path: Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(BENCH_FIELDS)
        for r in rows:
            writer.writerow([r.phase, r.n, r.f, repr(r.mu), r.field_ops, f"{r.wall_ms:.3f}"])


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argument errors share the input-error exit code
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _prime(text: str) -> int | None:
    if text == "auto":
        return None
    if not text.isdigit():
        raise argparse.ArgumentTypeError(f"expected a decimal prime or 'auto', got {text!r}")
    return int(text)


def _seed(text: str) -> int:
    if not text.isdigit() or int(text) >= 1 << 64:
        raise argparse.ArgumentTypeError(f"expected an unsigned 64-bit integer, got {text!r}")
    return int(text)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sensoracle", description="Sensitive distance and reachability oracle.")
    parser.add_argument("--mode", choices=("distance", "reach"), default="distance")
    parser.add_argument("--mu", type=float, default=0.0, help="query/preprocess trade-off in [0, 1]")
    parser.add_argument("--seed", type=_seed, default=0)
    parser.add_argument("--prime", type=_prime, default=None, help="decimal prime or 'auto'")
    parser.add_argument("--graph", type=Path, required=True)
    parser.add_argument("--updates", type=Path, required=True)
    parser.add_argument("--queries", type=Path, required=True)
    parser.add_argument("--verify", action="store_true", help="compare against brute-force answers")
    parser.add_argument("--bench", type=Path, default=None, metavar="CSV")
    return parser


def main(argv: Sequence[str] | None = None, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        config = RunConfig(
            args.mode, args.mu, args.seed, args.prime, args.graph, args.updates, args.queries,
            args.verify, args.bench,
        )
        lines, code, rows, notes = run_pipeline(config)
    except (ParseError, ConfigurationError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_INPUT
    except (SingularMatrixError, InvariantError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_ALGEBRA
    for line in lines:
        print(line, file=out)
    for note in notes:
        print(note, file=err)
    if config.bench is not None:
        write_bench(rows, config.bench)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
