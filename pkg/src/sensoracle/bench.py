"""Field-operation counts of the three phases across trade-off parameters."""

from __future__ import annotations

import time
from typing import Iterable, Sequence

import numpy as np

from .algebra.field import FieldConfig, select_field
from .algebra.kernels import OpCounter, counting
from .algebra.poly import Poly
from .cli import BenchRow
from .pmat import PolyMatrix
from .smw import apply_batch, preprocess, query_adj_entry


def random_matrix(fld: FieldConfig, n: int, d: int, rng: np.random.Generator) -> PolyMatrix:
    return PolyMatrix(fld, rng.integers(0, fld.p, size=(n, n, d + 1), dtype=np.uint64))


def tradeoff_rows(
    n: int = 128,
    d: int = 2,
    f: int = 2,
    mus: Sequence[float] = (0.0, 0.5, 1.0),
    queries: int = 8,
    seed: int = 0,
) -> list[BenchRow]:
    """Preprocess, update and query one random instance for every ``mu``.

    The matrix, the batch and the query positions are shared by all runs,
    so the rows differ only in the prefix depth.
    """
    rng = np.random.default_rng([seed, n, d, f])
    fld = select_field(n, d)
    a = random_matrix(fld, n, d, rng)
    cells = rng.choice(n * n, size=f, replace=False)
    changes = [
        (int(c) // n, int(c) % n, Poly(fld, rng.integers(0, fld.p, size=d + 1, dtype=np.uint64)))
        for c in cells
    ]
    positions = [tuple(int(x) for x in rng.integers(0, n, size=2)) for _ in range(queries)]
    rows: list[BenchRow] = []
    for mu in mus:
        rows.extend(_run(a, changes, positions, mu, n, f))
    return rows


def _run(a, changes, positions: Iterable[tuple[int, int]], mu: float, n: int, f: int) -> list[BenchRow]:
    out = []

    def phase(name, fn):
        counter = OpCounter()
        start = time.perf_counter()
        with counting(counter):
            result = fn()
        out.append(BenchRow(name, n, f, mu, counter.ops, (time.perf_counter() - start) * 1000.0))
        return result

    base = phase("preprocess", lambda: preprocess(a, mu, "oracle"))
    patch = phase("update", lambda: apply_batch(base, changes))
    phase("query", lambda: [query_adj_entry(base, patch, i, j) for i, j in positions])
    return out


def monotone(rows: Sequence[BenchRow], phase: str, direction: int) -> bool:
    """Whether ``field_ops`` of ``phase`` is monotone in ``mu`` (``+1`` non-decreasing, ``-1`` non-increasing)."""
    ops = [r.field_ops for r in sorted((r for r in rows if r.phase == phase), key=lambda r: r.mu)]
    return all(direction * (b - a) >= 0 for a, b in zip(ops, ops[1:]))
