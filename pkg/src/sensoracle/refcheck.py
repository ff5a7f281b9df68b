"""Brute-force reference answers: Bellman-Ford, BFS and cofactor adjoints."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import permutations
from typing import Mapping

from .algebra.poly import Poly
from .graphoracle import GraphSpec, UpdateBatch
from .pmat import PolyMatrix

MAX_COFACTOR_SIZE = 5


@dataclass(frozen=True, eq=False)
class RefGraph:
    """Weighted adjacency lists over nodes ``1..n``; ``dead`` nodes carry no paths."""

    n: int
    edges: Mapping[tuple[int, int], int]
    dead: frozenset[int] = frozenset()
    out: dict[int, list[tuple[int, int]]] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        out: dict[int, list[tuple[int, int]]] = {v: [] for v in range(1, self.n + 1)}
        for (u, v), w in sorted(self.edges.items()):
            if u not in self.dead and v not in self.dead:
                out[u].append((v, w))
        object.__setattr__(self, "out", out)

    @classmethod
    def from_spec(cls, spec: GraphSpec, batch: UpdateBatch | None = None) -> RefGraph:
        if batch is None:
            return cls(spec.n, dict(spec.edges))
        edges, dead = batch.apply_to(spec)
        return cls(spec.n, edges, dead)


class NegativeCycleDetected:
    """Marker returned when the graph contains a negative cycle."""

    def __repr__(self) -> str:
        return "NegativeCycleDetected()"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, NegativeCycleDetected)

    def __hash__(self) -> int:
        return hash(NegativeCycleDetected)


def has_negative_cycle(g: RefGraph) -> bool:
    """Bellman-Ford from a virtual source joined to every node by a 0-weight edge."""
    dist = {v: 0 for v in range(1, g.n + 1) if v not in g.dead}
    for _ in range(len(dist)):
        changed = False
        for u in dist:
            du = dist[u]
            for v, w in g.out[u]:
                if du + w < dist[v]:
                    dist[v] = du + w
                    changed = True
        if not changed:
            return False
    return True


def bellman_ford_all(g: RefGraph, src: int) -> list[int | None] | NegativeCycleDetected:
    """Distances from ``src`` (index ``v - 1``, ``None`` when unreachable).

    Any negative cycle anywhere in the graph yields :class:`NegativeCycleDetected`.
    """
    if has_negative_cycle(g):
        return NegativeCycleDetected()
    dist: list[int | None] = [None] * g.n
    if src in g.dead:
        return dist
    dist[src - 1] = 0
    for _ in range(g.n - 1):
        changed = False
        for u in range(1, g.n + 1):
            du = dist[u - 1]
            if du is None:
                continue
            for v, w in g.out[u]:
                dv = dist[v - 1]
                if dv is None or du + w < dv:
                    dist[v - 1] = du + w
                    changed = True
        if not changed:
            break
    return dist


def bfs_reach(g: RefGraph, u: int, v: int) -> bool:
    """Whether ``v`` is reachable from ``u`` through live nodes."""
    if u in g.dead or v in g.dead:
        return False
    seen = {u}
    todo = deque([u])
    while todo:
        x = todo.popleft()
        if x == v:
            return True
        for y, _ in g.out[x]:
            if y not in seen:
                seen.add(y)
                todo.append(y)
    return False


def _perm_sign(perm: tuple[int, ...]) -> int:
    sign = 1
    seen = [False] * len(perm)
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        x = start
        while not seen[x]:
            seen[x] = True
            x = perm[x]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _leibniz(grid: list[list[Poly]], one: Poly) -> Poly:
    total = one * 0
    for perm in permutations(range(len(grid))):
        term = one
        for r, c in enumerate(perm):
            term = term * grid[r][c]
            if term.is_zero():
                break
        total = total + term if _perm_sign(perm) > 0 else total - term
    return total


def cofactor_adjoint(b: PolyMatrix) -> PolyMatrix:
    """``adj(B)[i, j] = (-1)**(i + j) det(B without row j and column i)`` by Leibniz expansion."""
    n = b.rows
    if b.cols != n:
        raise ValueError(f"square matrix required, got {b.shape}")
    if n > MAX_COFACTOR_SIZE:
        raise ValueError(f"cofactor expansion limited to n <= {MAX_COFACTOR_SIZE}, got {n}")
    one = Poly.constant(b.field, 1)
    grid = b.to_polys()
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            minor = [[grid[r][c] for c in range(n) if c != i] for r in range(n) if r != j]
            cof = _leibniz(minor, one)
            row.append(cof if (i + j) % 2 == 0 else -cof)
        out.append(row)
    return PolyMatrix.from_polys(b.field, out)
