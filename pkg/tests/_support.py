"""Shared builders and independent reference computations for the tests."""

from __future__ import annotations

import numpy as np
import sympy
from hypothesis import strategies as st

from sensoracle.algebra import BUILTIN_PRIMES, FieldConfig, Poly
from sensoracle.graphoracle import Delete, DeleteNode, GraphSpec, Insert, Reweight, UpdateBatch
from sensoracle.pmat import PolyMatrix

FIELD = FieldConfig(*BUILTIN_PRIMES[0])
P = FIELD.p
X = sympy.Symbol("X")


def rand_poly(rng: np.random.Generator, degree: int, fld: FieldConfig = FIELD) -> Poly:
    return Poly(fld, rng.integers(0, fld.p, size=degree + 1, dtype=np.uint64))


def rand_pm(rng: np.random.Generator, rows: int, cols: int, degree: int, fld: FieldConfig = FIELD) -> PolyMatrix:
    return PolyMatrix(fld, rng.integers(0, fld.p, size=(rows, cols, degree + 1), dtype=np.uint64))


def rand_nonsingular(rng: np.random.Generator, n: int, degree: int, fld: FieldConfig = FIELD) -> PolyMatrix:
    from sensoracle.pmat import det_poly

    while True:
        b = rand_pm(rng, n, n, degree, fld)
        if not det_poly(b).is_zero():
            return b


def polys(max_degree: int = 12, fld: FieldConfig = FIELD):
    return st.lists(st.integers(0, fld.p - 1), max_size=max_degree + 1).map(lambda c: Poly(fld, c))


def schoolbook(a: list[int], b: list[int], p: int = P) -> list[int]:
    """Convolution with Python integers, trailing zeros trimmed."""
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = (out[i + j] + x * y) % p
    while out and out[-1] == 0:
        out.pop()
    return out


def schoolbook_matmul(a: PolyMatrix, b: PolyMatrix) -> list[list[list[int]]]:
    ga, gb = a.to_lists(), b.to_lists()
    out = []
    for i in range(a.rows):
        row = []
        for j in range(b.cols):
            acc: list[int] = []
            for k in range(a.cols):
                term = schoolbook(ga[i][k], gb[k][j])
                size = max(len(acc), len(term))
                acc = [((acc[t] if t < len(acc) else 0) + (term[t] if t < len(term) else 0)) % P for t in range(size)]
            while acc and acc[-1] == 0:
                acc.pop()
            row.append(acc)
        out.append(row)
    return out


def to_sympy(m: PolyMatrix) -> sympy.Matrix:
    grid = m.to_lists()
    return sympy.Matrix(m.rows, m.cols, lambda i, j: sum(int(c) * X**k for k, c in enumerate(grid[i][j])))


def sympy_det(m: PolyMatrix) -> Poly:
    """Determinant by sympy over the integers, reduced mod p."""
    det = sympy.expand(to_sympy(m).det(method="berkowitz"))
    coeffs = sympy.Poly(det, X).all_coeffs()[::-1] if det != 0 else []
    return Poly(m.field, [int(c) % m.field.p for c in coeffs])


def with_entries(a: PolyMatrix, changes) -> PolyMatrix:
    """Copy of ``a`` with ``a[i, j] := value`` for every change."""
    length = max([a.length] + [len(v) for _, _, v in changes])
    coeffs = a.padded(length).copy()
    for i, j, v in changes:
        coeffs[i, j] = 0
        coeffs[i, j, : len(v)] = v.coeffs
    return PolyMatrix(a.field, coeffs)


def random_changes(rng: np.random.Generator, n: int, f: int, degree: int, fld: FieldConfig = FIELD):
    cells = rng.choice(n * n, size=f, replace=False)
    return [(int(c) // n, int(c) % n, rand_poly(rng, degree, fld)) for c in cells]


# graphs


def random_graph(rng: np.random.Generator, n: int, W: int, density: float, negative_share: float = 0.1) -> GraphSpec:
    edges = {}
    for u in range(1, n + 1):
        for v in range(1, n + 1):
            if u != v and rng.random() < density:
                if rng.random() < negative_share:
                    edges[(u, v)] = int(rng.integers(-W, W + 1))
                else:
                    edges[(u, v)] = int(rng.integers(0, W + 1))
    return GraphSpec(n, W, edges)


def random_batch(rng: np.random.Generator, spec: GraphSpec, f: int, *, node_deletions: bool = False) -> UpdateBatch:
    """Up to ``f`` valid operations mixing inserts, deletes and reweights."""
    n, W = spec.n, spec.W
    present = sorted(spec.edges)
    ops = []
    slots: set[tuple] = set()
    kinds = 4 if node_deletions else 3
    for _ in range(50 * (f + 1)):
        if len(ops) == f:
            break
        kind = int(rng.integers(kinds))
        if kind == 3:
            v = int(rng.integers(1, n + 1))
            if ("node", v) not in slots:
                slots.add(("node", v))
                ops.append(DeleteNode(v))
        elif kind == 0:
            u, v = (int(x) for x in rng.integers(1, n + 1, size=2))
            if u != v and (u, v) not in spec.edges and ("edge", u, v) not in slots:
                slots.add(("edge", u, v))
                ops.append(Insert(u, v, int(rng.integers(-W, W + 1))))
        elif present:
            u, v = present[int(rng.integers(len(present)))]
            if ("edge", u, v) not in slots:
                slots.add(("edge", u, v))
                ops.append(Delete(u, v) if kind == 1 else Reweight(u, v, int(rng.integers(-W, W + 1))))
    return UpdateBatch(tuple(ops))
