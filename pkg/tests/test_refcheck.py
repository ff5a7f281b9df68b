from __future__ import annotations

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _support import FIELD, P, rand_pm, random_batch, random_graph
from sensoracle.algebra import Poly
from sensoracle.graphoracle import DeleteNode, GraphSpec, UpdateBatch
from sensoracle.pmat import PolyMatrix, adj_naive, det_poly, pm_mul
from sensoracle.refcheck import (
    NegativeCycleDetected,
    RefGraph,
    bellman_ford_all,
    bfs_reach,
    cofactor_adjoint,
    has_negative_cycle,
)


def to_networkx(g: RefGraph) -> nx.DiGraph:
    out = nx.DiGraph()
    out.add_nodes_from(v for v in range(1, g.n + 1) if v not in g.dead)
    for u, targets in g.out.items():
        for v, w in targets:
            out.add_edge(u, v, weight=w)
    return out


def closure_by_matrix_powers(g: RefGraph) -> np.ndarray:
    """Reflexive transitive closure over live nodes by repeated boolean squaring."""
    alive = np.array([v not in g.dead for v in range(1, g.n + 1)])
    r = np.diag(alive).astype(bool)
    for u, targets in g.out.items():
        for v, _ in targets:
            r[u - 1, v - 1] = True
    for _ in range(max(1, g.n.bit_length())):
        r = r | (r.astype(np.int64) @ r.astype(np.int64) > 0)
    return r


# examples


def test_bellman_ford_examples():
    path = RefGraph(3, {(1, 2): 1, (2, 3): 1})
    assert bellman_ford_all(path, 1) == [0, 1, 2]
    assert bellman_ford_all(path, 3) == [None, None, 0]
    cycle = RefGraph(2, {(1, 2): 1, (2, 1): -2})
    assert has_negative_cycle(cycle)
    assert bellman_ford_all(cycle, 1) == NegativeCycleDetected()
    assert not has_negative_cycle(RefGraph(2, {(1, 2): 1, (2, 1): -1}))


def test_negative_cycle_among_unreachable_nodes_still_reported():
    g = RefGraph(4, {(1, 2): 0, (3, 4): -1, (4, 3): 0})
    assert bellman_ford_all(g, 1) == NegativeCycleDetected()


def test_dead_nodes_are_removed():
    spec = GraphSpec(3, 1, {(1, 2): 0, (2, 3): 0, (3, 2): -1})
    g = RefGraph.from_spec(spec, UpdateBatch((DeleteNode(2),)))
    assert not has_negative_cycle(g)
    assert not bfs_reach(g, 1, 3)
    assert not bfs_reach(g, 2, 2)
    assert bfs_reach(g, 3, 3)
    assert bellman_ford_all(g, 2) == [None, None, None]


def test_bfs_examples():
    g = RefGraph(4, {(1, 2): 0, (2, 3): 0})
    assert bfs_reach(g, 1, 3)
    assert bfs_reach(g, 4, 4)
    assert not bfs_reach(g, 3, 1)
    assert not bfs_reach(g, 1, 4)


# cross-checks against networkx and matrix closure


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 9), st.integers(0, 3), st.floats(0.0, 0.5), st.integers(0, 2**32))
def test_bellman_ford_matches_networkx(n, W, density, seed):
    rng = np.random.default_rng(seed)
    g = RefGraph.from_spec(random_graph(rng, n, W, density, negative_share=0.3))
    ng = to_networkx(g)
    negative = nx.negative_edge_cycle(ng) if ng.number_of_edges() else False
    assert has_negative_cycle(g) == negative
    src = int(rng.integers(1, n + 1))
    got = bellman_ford_all(g, src)
    if negative:
        assert got == NegativeCycleDetected()
        return
    lengths = nx.single_source_bellman_ford_path_length(ng, src)
    assert got == [lengths.get(v) for v in range(1, n + 1)]


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 12), st.floats(0.0, 0.4), st.integers(0, 5), st.integers(0, 2**32))
def test_reachability_matches_closure_and_networkx(n, density, f, seed):
    rng = np.random.default_rng(seed)
    spec = random_graph(rng, n, 0, density)
    g = RefGraph.from_spec(spec, random_batch(rng, spec, f, node_deletions=True))
    closure = closure_by_matrix_powers(g)
    ng = to_networkx(g)
    for u in range(1, n + 1):
        for v in range(1, n + 1):
            got = bfs_reach(g, u, v)
            assert got == bool(closure[u - 1, v - 1])
            assert got == (u in ng and v in ng and nx.has_path(ng, u, v))


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 8), st.integers(1, 3), st.floats(0.1, 0.6), st.integers(0, 2**32))
def test_distances_satisfy_triangle_inequality(n, W, density, seed):
    rng = np.random.default_rng(seed)
    g = RefGraph.from_spec(random_graph(rng, n, W, density, negative_share=0.0))
    table = [bellman_ford_all(g, u) for u in range(1, n + 1)]
    for u in range(n):
        for v in range(n):
            for w in range(n):
                if table[u][v] is not None and table[v][w] is not None:
                    assert table[u][w] is not None and table[u][w] <= table[u][v] + table[v][w]


# cofactor adjoints


def test_cofactor_examples():
    m = PolyMatrix.from_scalar(FIELD, np.array([[1, 2], [3, 4]], dtype=np.uint64))
    assert cofactor_adjoint(m).to_lists() == [[[4], [P - 2]], [[P - 3], [1]]]
    assert cofactor_adjoint(PolyMatrix.identity(FIELD, 3)) == PolyMatrix.identity(FIELD, 3)
    assert cofactor_adjoint(PolyMatrix.from_scalar(FIELD, np.array([[7]], dtype=np.uint64))) == PolyMatrix.identity(FIELD, 1)
    with pytest.raises(ValueError):
        cofactor_adjoint(PolyMatrix.identity(FIELD, 6))


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2), st.integers(0, 2**32))
def test_cofactor_adjoint_defining_identity(n, d, seed):
    b = rand_pm(np.random.default_rng(seed), n, n, d)
    adj = cofactor_adjoint(b)
    scaled = PolyMatrix.identity(FIELD, n).scale(det_poly(b))
    assert pm_mul(adj, b) == scaled
    assert adj == adj_naive(b)
    assert all(adj.entry(i, j).degree <= d * (n - 1) for i in range(n) for j in range(n))


def test_cofactor_of_polynomial_two_by_two():
    x = Poly(FIELD, [0, 1])
    b = PolyMatrix.from_polys(FIELD, [[x, 1], [0, x]])
    assert cofactor_adjoint(b).to_polys() == [[x, Poly.constant(FIELD, -1)], [Poly.zero(FIELD), x]]
