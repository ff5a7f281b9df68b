"""Sensitive distance and reachability oracles for weighted digraphs.

Distances use the polynomial encoding ``A[i, i] = X**W`` and
``A[u, v] = a_uv X**(W + w_uv)`` with random non-zero ``a_uv``.  Every
cycle cover contributes a monomial of degree ``W n`` plus its total weight,
so the smallest non-zero degree of ``adj(A)[u, v]`` is ``W (n - 1)`` plus the
length of a shortest ``u -> v`` path, and ``det(A)`` has a monomial of degree
below ``W n`` exactly when some cycle is negative (with high probability).

Reachability splits every node into ``v_in -> v_out`` joined by a random
liveness coefficient, so deleting a node is a single entry update of a
scalar ``2n x 2n`` matrix ``I + N``.  ``adj[u_in, v_out]`` is non-zero iff
``v`` is reachable from ``u`` through live nodes.

Nodes are 1-indexed at this layer.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

import numpy as np

from .algebra.field import FieldConfig, select_field
from .algebra.poly import Poly, min_nonzero_degree
from .errors import ConfigurationError, RetryWithNewSeed, SingularMatrixError
from .pmat import PolyMatrix
from .smw import BaseState, UpdatePatch, apply_batch, current_det, preprocess, query_adj_entry, query_adj_value

# RNG stream tags, mixed with the user seed
_EDGE_STREAM = 0
_UPDATE_STREAM = 1
_NODE_STREAM = 2


# graphs and updates


@dataclass(frozen=True, eq=False)
class GraphSpec:
    """Directed graph on nodes ``1..n`` with integer weights in ``[-W, W]``."""

    n: int
    W: int
    edges: Mapping[tuple[int, int], int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ConfigurationError(f"node count must be positive, got {self.n}")
        if self.W < 0:
            raise ConfigurationError(f"weight bound must be non-negative, got {self.W}")
        edges = dict(self.edges)
        for (u, v), w in edges.items():
            _check_edge(self.n, self.W, u, v, w)
        object.__setattr__(self, "edges", edges)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GraphSpec):
            return NotImplemented
        return (self.n, self.W, self.edges) == (other.n, other.W, other.edges)

    @classmethod
    def from_triples(cls, n: int, W: int, triples: Iterable[tuple[int, int, int]]) -> GraphSpec:
        edges: dict[tuple[int, int], int] = {}
        for u, v, w in triples:
            if (u, v) in edges:
                raise ConfigurationError(f"parallel edge {u}->{v}")
            edges[(u, v)] = w
        return cls(n, W, edges)


def _check_node(n: int, v: int) -> None:
    if not 1 <= v <= n:
        raise ConfigurationError(f"node {v} outside 1..{n}")


def _check_edge(n: int, W: int, u: int, v: int, w: int | None = None) -> None:
    _check_node(n, u)
    _check_node(n, v)
    if u == v:
        raise ConfigurationError(f"self-loop at node {u}")
    if w is not None and abs(w) > W:
        raise ConfigurationError(f"weight {w} of edge {u}->{v} exceeds bound {W}")


@dataclass(frozen=True)
class Insert:
    u: int
    v: int
    w: int


@dataclass(frozen=True)
class Delete:
    u: int
    v: int


@dataclass(frozen=True)
class Reweight:
    u: int
    v: int
    w: int


@dataclass(frozen=True)
class DeleteNode:
    v: int


Op = Union[Insert, Delete, Reweight, DeleteNode]


@dataclass(frozen=True)
class UpdateBatch:
    ops: tuple[Op, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "ops", tuple(self.ops))

    def __len__(self) -> int:
        return len(self.ops)

    def validate(self, spec: GraphSpec, *, allow_node_deletion: bool) -> None:
        """Raise :class:`ConfigurationError` unless the batch applies cleanly to ``spec``."""
        slots: set[tuple] = set()
        for op in self.ops:
            if isinstance(op, DeleteNode):
                if not allow_node_deletion:
                    raise ConfigurationError("node deletions are only supported for reachability")
                _check_node(spec.n, op.v)
                slot: tuple = ("node", op.v)
            else:
                _check_edge(spec.n, spec.W, op.u, op.v, getattr(op, "w", None))
                present = (op.u, op.v) in spec.edges
                if isinstance(op, Insert) and present:
                    raise ConfigurationError(f"edge {op.u}->{op.v} already exists")
                if not isinstance(op, Insert) and not present:
                    raise ConfigurationError(f"edge {op.u}->{op.v} does not exist")
                slot = ("edge", op.u, op.v)
            if slot in slots:
                raise ConfigurationError(f"more than one operation on {slot[0]} {slot[1:]}")
            slots.add(slot)

    def apply_to(self, spec: GraphSpec) -> tuple[dict[tuple[int, int], int], frozenset[int]]:
        """Edge map and deleted node set after the batch."""
        edges = dict(spec.edges)
        dead: set[int] = set()
        for op in self.ops:
            if isinstance(op, DeleteNode):
                dead.add(op.v)
            elif isinstance(op, Delete):
                del edges[(op.u, op.v)]
            else:
                edges[(op.u, op.v)] = op.w
        return edges, frozenset(dead)


# answers


@dataclass(frozen=True)
class Dist:
    k: int


@dataclass(frozen=True)
class Unreachable:
    pass


@dataclass(frozen=True)
class NegativeCycle:
    pass


@dataclass(frozen=True)
class Reach:
    flag: bool


QueryAnswer = Union[Dist, Unreachable, NegativeCycle, Reach]


# shared helpers


def _field_for(n: int, degree: int, prime: int | None) -> FieldConfig:
    if prime is None:
        return select_field(n, degree)
    return FieldConfig.from_prime(prime)


def _nonzero(rng: np.random.Generator, p: int, count: int) -> list[int]:
    return [int(x) for x in rng.integers(1, p, size=count, dtype=np.uint64)]


def _edge_coefficients(spec: GraphSpec, seed: int, p: int) -> dict[tuple[int, int], int]:
    keys = sorted(spec.edges)
    rng = np.random.default_rng([seed, _EDGE_STREAM])
    return dict(zip(keys, _nonzero(rng, p, len(keys))))


# distance oracle


def encode_with(
    n: int, W: int, edges: Mapping[tuple[int, int], int], coeffs: Mapping[tuple[int, int], int], fld: FieldConfig
) -> PolyMatrix:
    """Polynomial encoding of ``edges`` with the given coefficients (``d = 2W``)."""
    out = np.zeros((n, n, 2 * W + 1), dtype=np.uint64)
    out[np.arange(n), np.arange(n), W] = 1
    for (u, v), w in edges.items():
        out[u - 1, v - 1, W + w] = coeffs[(u, v)] % fld.p
    return PolyMatrix(fld, out)


def encode_distance(spec: GraphSpec, seed: int = 0, fld: FieldConfig | None = None) -> PolyMatrix:
    """Encoding of ``spec`` with coefficients drawn from ``seed``.

    Raises :class:`CapacityError` when no built-in prime serves the instance.
    """
    fld = fld or select_field(spec.n, 2 * spec.W)
    return encode_with(spec.n, spec.W, spec.edges, _edge_coefficients(spec, seed, fld.p), fld)


@dataclass
class DistanceOracle:
    """Distances under one batch of edge changes.

    ``update`` replaces the active batch; queries see the base graph with the
    latest batch applied.
    """

    spec: GraphSpec
    seed: int
    field: FieldConfig
    mu: float
    mode: str
    coefficients: dict[tuple[int, int], int]
    base: BaseState
    patch: UpdatePatch | None = None
    batch: UpdateBatch = field(default_factory=UpdateBatch)
    updates: int = 0
    batch_coefficients: dict[tuple[int, int], int] = field(default_factory=dict)
    _negative_cycle: bool | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.spec.n

    def update(self, batch: UpdateBatch) -> None:
        update_distance(self, batch)

    def query(self, u: int, v: int) -> QueryAnswer:
        return query_distance(self, u, v)

    def updated_matrix(self) -> PolyMatrix:
        """Fresh encoding of the updated graph with the coefficients in use."""
        edges, _ = self.batch.apply_to(self.spec)
        coeffs = {**self.coefficients, **self.batch_coefficients}
        return encode_with(self.n, self.spec.W, edges, coeffs, self.field)

    def has_negative_cycle(self) -> bool:
        if self._negative_cycle is None:
            det = current_det(self.base, self.patch)
            low = min_nonzero_degree(det)
            self._negative_cycle = low is not None and low < self.spec.W * self.n
        return self._negative_cycle


def build_distance_oracle(
    spec: GraphSpec,
    mu: float = 0.0,
    seed: int = 0,
    *,
    prime: int | None = None,
    mode: str = "oracle",
) -> DistanceOracle:
    """Encode ``spec`` and preprocess it.

    Raises :class:`RetryWithNewSeed` if the random encoding is singular.
    """
    fld = _field_for(spec.n, 2 * spec.W, prime)
    coeffs = _edge_coefficients(spec, seed, fld.p)
    a = encode_with(spec.n, spec.W, spec.edges, coeffs, fld)
    try:
        base = preprocess(a, mu, mode, degree=2 * spec.W)  # type: ignore[arg-type]
    except SingularMatrixError as exc:
        raise RetryWithNewSeed(f"encoding is singular for seed {seed}") from exc
    return DistanceOracle(spec, seed, fld, mu, mode, coeffs, base)


def _distance_changes(
    oracle: DistanceOracle, batch: UpdateBatch
) -> tuple[list[tuple[int, int, Poly]], dict[tuple[int, int], int]]:
    fld, W = oracle.field, oracle.spec.W
    rng = np.random.default_rng([oracle.seed, _UPDATE_STREAM, oracle.updates])
    fresh = _nonzero(rng, fld.p, len(batch.ops))
    changes = []
    used = {}
    for op, a in zip(batch.ops, fresh):
        if isinstance(op, Delete):
            changes.append((op.u - 1, op.v - 1, Poly.zero(fld)))
        else:
            assert isinstance(op, (Insert, Reweight))
            changes.append((op.u - 1, op.v - 1, Poly.monomial(fld, a, W + op.w)))
            used[(op.u, op.v)] = a
    return changes, used


def update_distance(oracle: DistanceOracle, batch: UpdateBatch) -> DistanceOracle:
    """Replace the active batch of ``oracle`` (in place) and return it."""
    batch.validate(oracle.spec, allow_node_deletion=False)
    changes, used = _distance_changes(oracle, batch)
    try:
        patch = apply_batch(oracle.base, changes)
    except SingularMatrixError as exc:
        raise RetryWithNewSeed("encoding became singular after the update") from exc
    finally:
        oracle.updates += 1
    oracle.patch, oracle.batch, oracle._negative_cycle = patch, batch, None
    oracle.batch_coefficients = used
    return oracle


def query_distance(oracle: DistanceOracle, u: int, v: int) -> QueryAnswer:
    """Distance from ``u`` to ``v`` in the updated graph."""
    n = oracle.n
    _check_node(n, u)
    _check_node(n, v)
    if oracle.has_negative_cycle():
        return NegativeCycle()
    if u == v:
        return Dist(0)
    entry = query_adj_entry(oracle.base, oracle.patch, u - 1, v - 1)
    low = min_nonzero_degree(entry)
    if low is None:
        return Unreachable()
    return Dist(low - oracle.spec.W * (n - 1))


# reachability oracle


def _node_in(v: int) -> int:
    return 2 * (v - 1)


def _node_out(v: int) -> int:
    return 2 * (v - 1) + 1


def encode_reach(
    spec: GraphSpec,
    edge_coeffs: Mapping[tuple[int, int], int],
    node_coeffs: list[int],
    fld: FieldConfig,
) -> PolyMatrix:
    """Scalar ``2n x 2n`` split-node matrix."""
    n = spec.n
    out = np.eye(2 * n, dtype=np.uint64)
    for v in range(1, n + 1):
        out[_node_in(v), _node_out(v)] = node_coeffs[v - 1] % fld.p
    for (u, v) in spec.edges:
        out[_node_out(u), _node_in(v)] = edge_coeffs[(u, v)] % fld.p
    return PolyMatrix.from_scalar(fld, out)


@dataclass
class ReachOracle:
    """Reachability under one batch of edge changes and node deletions."""

    spec: GraphSpec
    seed: int
    field: FieldConfig
    coefficients: dict[tuple[int, int], int]
    node_coefficients: list[int]
    base: BaseState
    patch: UpdatePatch | None = None
    batch: UpdateBatch = field(default_factory=UpdateBatch)
    updates: int = 0

    @property
    def n(self) -> int:
        return self.spec.n

    def update(self, batch: UpdateBatch) -> None:
        update_reach(self, batch)

    def query(self, u: int, v: int) -> Reach:
        return query_reach(self, u, v)


def build_reach_oracle(spec: GraphSpec, seed: int = 0, *, prime: int | None = None) -> ReachOracle:
    """Encode ``spec`` (weights ignored) and store the explicit adjoint."""
    fld = _field_for(2 * spec.n, 0, prime)
    coeffs = _edge_coefficients(spec, seed, fld.p)
    nodes = _nonzero(np.random.default_rng([seed, _NODE_STREAM]), fld.p, spec.n)
    a = encode_reach(spec, coeffs, nodes, fld)
    try:
        base = preprocess(a, 0.0, "naive")
    except SingularMatrixError as exc:
        raise RetryWithNewSeed(f"encoding is singular for seed {seed}") from exc
    return ReachOracle(spec, seed, fld, coeffs, nodes, base)


def update_reach(oracle: ReachOracle, batch: UpdateBatch) -> ReachOracle:
    """Replace the active batch of ``oracle`` (in place) and return it."""
    batch.validate(oracle.spec, allow_node_deletion=True)
    rng = np.random.default_rng([oracle.seed, _UPDATE_STREAM, oracle.updates])
    fresh = _nonzero(rng, oracle.field.p, len(batch.ops))
    changes: list[tuple[int, int, int]] = []
    for op, a in zip(batch.ops, fresh):
        if isinstance(op, DeleteNode):
            changes.append((_node_in(op.v), _node_out(op.v), 0))
        elif isinstance(op, Delete):
            changes.append((_node_out(op.u), _node_in(op.v), 0))
        else:
            changes.append((_node_out(op.u), _node_in(op.v), a))
    try:
        patch = apply_batch(oracle.base, changes)
    except SingularMatrixError as exc:
        raise RetryWithNewSeed("encoding became singular after the update") from exc
    finally:
        oracle.updates += 1
    oracle.patch, oracle.batch = patch, batch
    return oracle


def query_reach(oracle: ReachOracle, u: int, v: int) -> Reach:
    """Whether ``v`` is reachable from ``u`` in the updated graph."""
    _check_node(oracle.n, u)
    _check_node(oracle.n, v)
    return Reach(query_adj_value(oracle.base, oracle.patch, _node_in(u), _node_out(v)) != 0)
