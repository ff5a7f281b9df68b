from __future__ import annotations

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from _support import FIELD, P, rand_nonsingular, rand_pm
from sensoracle.algebra import Poly
from sensoracle.errors import RankDegeneracyError, SingularMatrixError
from sensoracle.kbd import (
    build_chain,
    build_kbd,
    build_prefix,
    cdeg_shifted,
    chain_depth,
    chain_product,
    check_chain_identity,
    check_divisibility,
    degree_report,
    minimal_kernel_basis,
    prefix_depth,
    query_entry,
    query_row,
)
from sensoracle.pmat import PolyMatrix, adj_naive, det_poly, pm_mul, pm_vec_mul

NEG_INF = float("-inf")


def xpoly(*coeffs: int) -> Poly:
    return Poly(FIELD, list(coeffs))


# shifted degrees


def test_cdeg_examples():
    assert cdeg_shifted(PolyMatrix.from_polys(FIELD, [[xpoly(0, 0, 1)]]), [0]) == [2]
    assert cdeg_shifted(PolyMatrix.identity(FIELD, 2), [1, 3]) == [1, 3]
    m = PolyMatrix.from_polys(FIELD, [[1, 0], [xpoly(0, 1), 0]])
    assert cdeg_shifted(m, [2, 0]) == [2, NEG_INF]
    with pytest.raises(ValueError):
        cdeg_shifted(m, [0])


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 2**32))
def test_vector_products_obey_shifted_degrees(rows, cols, seed):
    rng = np.random.default_rng(seed)
    m = rand_pm(rng, rows, cols, int(rng.integers(0, 3)))
    shift = [int(s) for s in rng.integers(0, 4, size=rows)]
    v = [Poly(FIELD, rng.integers(0, P, size=s + 1, dtype=np.uint64)) for s in shift]
    bounds = cdeg_shifted(m, shift)
    for entry, bound in zip(pm_vec_mul(v, m), bounds):
        assert entry.degree <= bound


# minimal kernel bases


def _rank_over_rational_functions(n: PolyMatrix) -> int:
    """Rank at a random evaluation point, with the exact rank from sympy as a cross-check."""
    x = sympy.Symbol("X")
    grid = n.to_lists()
    mat = sympy.Matrix(n.rows, n.cols, lambda i, j: sum(int(c) * x**k for k, c in enumerate(grid[i][j])))
    return mat.subs(x, 987654321).rank(iszerofunc=lambda e: e % P == 0)


def test_kernel_of_coordinate_row():
    n = minimal_kernel_basis(PolyMatrix.from_scalar(FIELD, np.array([[1, 0]], dtype=np.uint64)), [0, 0])
    assert n.shape == (2, 1)
    assert n[0, 0].is_zero() and n[1, 0] == Poly.constant(FIELD, 1)


def test_kernel_of_symmetric_cancellation():
    bpart = PolyMatrix.from_polys(FIELD, [[xpoly(0, 1), xpoly(0, -1)]])
    n = minimal_kernel_basis(bpart, [1, 1])
    assert n.to_lists() == [[[1]], [[1]]]


@pytest.mark.parametrize("seed", range(5))
def test_kernel_of_random_two_by_four(seed):
    rng = np.random.default_rng(seed)
    bpart = rand_pm(rng, 2, 4, 1)
    shift = [1, 1, 1, 1]
    n = minimal_kernel_basis(bpart, shift)
    assert n.shape == (4, 2)
    assert pm_mul(bpart, n).is_zero()
    assert _rank_over_rational_functions(n) == 2
    assert sum(cdeg_shifted(n, shift)) <= sum(shift)


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 4), st.integers(0, 3), st.integers(0, 2**32))
def test_kernel_basis_contract(r, d, seed):
    rng = np.random.default_rng(seed)
    m = 2 * r
    bpart = rand_pm(rng, r, m, d)
    shift = [int(c) if c != NEG_INF else 0 for c in bpart.col_degree_bound]
    shift = [s + int(rng.integers(0, 2)) for s in shift]
    n = minimal_kernel_basis(bpart, shift)
    assert n.shape == (m, m - r)
    assert pm_mul(bpart, n).is_zero()
    assert sum(cdeg_shifted(n, shift)) <= sum(shift)


def test_kernel_rejects_rank_deficient_rows():
    row = rand_pm(np.random.default_rng(1), 1, 4, 1)
    bpart = PolyMatrix(FIELD, np.concatenate([row.coeffs, row.coeffs], axis=0))
    with pytest.raises(RankDegeneracyError):
        minimal_kernel_basis(bpart, [1, 1, 1, 1])


def test_kernel_rejects_bad_shift():
    bpart = rand_pm(np.random.default_rng(2), 1, 2, 2)
    with pytest.raises(ValueError):
        minimal_kernel_basis(bpart, [1, 1])
    with pytest.raises(ValueError):
        minimal_kernel_basis(bpart, [2])


# chains


def test_chain_of_identity():
    oracle = build_chain(PolyMatrix.identity(FIELD, 2))
    assert oracle.depth == 1
    assert oracle.diagonal == (Poly.constant(FIELD, 1),) * 2
    assert chain_product(oracle) == PolyMatrix.identity(FIELD, 2)


def test_chain_of_diagonal_matrix():
    b = PolyMatrix.from_polys(FIELD, [[xpoly(0, 1), 0], [0, xpoly(0, 1)]])
    oracle = build_chain(b)
    for entry in oracle.diagonal:
        assert entry.degree == 1 and entry[0] == 0
    assert check_chain_identity(oracle, b)


@pytest.mark.parametrize("seed", range(3))
def test_chain_of_random_four_by_four(seed):
    b = rand_nonsingular(np.random.default_rng(seed), 4, 1)
    oracle = build_chain(b)
    assert oracle.depth == 2
    prod = pm_mul(pm_mul(b, oracle.levels[0].as_matrix()), oracle.levels[1].as_matrix())
    off_diag = prod.coeffs.copy()
    off_diag[np.arange(4), np.arange(4)] = 0
    assert not off_diag.any()


def test_chain_blocks_tile_and_halve():
    b = rand_nonsingular(np.random.default_rng(8), 11, 1)
    oracle = build_chain(b)
    for index, level in enumerate(oracle.levels):
        bounds = level.boundaries
        assert bounds[0][0] == 0 and bounds[-1][1] == 11
        assert all(hi == lo2 for (_, hi), (lo2, _) in zip(bounds, bounds[1:]))
        sizes = [hi - lo for lo, hi in bounds]
        target = 11 / 2**index
        assert all(target / 2 <= s <= 2 * target for s in sizes)
        for blk in level.blocks:
            assert blk.split == (blk.size + 1) // 2


def test_chain_rejects_singular():
    with pytest.raises(SingularMatrixError):
        build_chain(PolyMatrix.zeros(FIELD, 3, 3))


def test_chain_on_one_by_one():
    b = PolyMatrix.from_polys(FIELD, [[xpoly(2, 3)]])
    oracle = build_kbd(b, 1.0)
    assert oracle.depth == 0
    assert query_entry(oracle, 0, 0) == Poly.constant(FIELD, 1)


def test_diagonal_product_matches_determinant_only_up_to_extra_factors():
    rng = np.random.default_rng(21)
    b = rand_nonsingular(rng, 4, 1)
    oracle = build_chain(b)
    prod = Poly.constant(FIELD, 1)
    for entry in oracle.diagonal:
        prod = prod * entry
    det = det_poly(b)
    # det(B) det(A_1 ... A_L) = prod(D), so det(B) always divides the product
    from sensoracle.algebra import poly_divmod

    assert poly_divmod(prod, det)[1].is_zero()


# prefixes and queries


def test_prefix_depth():
    assert prefix_depth(4, 0.5) == 1
    assert prefix_depth(4, 0.0) == 0
    assert prefix_depth(16, 1.0) == 4
    assert prefix_depth(12, 1.0) == chain_depth(12) == 4
    assert prefix_depth(1, 1.0) == 0
    with pytest.raises(ValueError):
        prefix_depth(4, 1.5)


def test_prefix_examples():
    rng = np.random.default_rng(4)
    b = rand_nonsingular(rng, 4, 1)
    chain = build_chain(b)
    assert build_prefix(chain, 0.0).prefix_product() == PolyMatrix.identity(FIELD, 4)
    assert build_prefix(chain, 0.5).prefix == chain.levels[0].as_matrix()
    full = build_prefix(chain, 1.0)
    lhs = pm_mul(b, full.prefix_product())
    diag = np.zeros_like(lhs.coeffs)
    diag[np.arange(4), np.arange(4)] = lhs.coeffs[np.arange(4), np.arange(4)]
    assert np.array_equal(lhs.coeffs, diag)


def test_query_examples():
    oracle = build_kbd(PolyMatrix.identity(FIELD, 3), 0.5)
    for i in range(3):
        for j in range(3):
            assert query_entry(oracle, i, j) == Poly.constant(FIELD, int(i == j))
    upper = PolyMatrix.from_scalar(FIELD, np.array([[1, 1], [0, 1]], dtype=np.uint64))
    assert query_entry(build_kbd(upper), 0, 1) == Poly.constant(FIELD, -1)
    with pytest.raises(IndexError):
        query_entry(oracle, 3, 0)


@pytest.mark.parametrize("mu", [0.0, 0.5, 1.0])
def test_query_entry_matches_naive_adjoint(mu):
    rng = np.random.default_rng(31)
    b = rand_nonsingular(rng, 8, 2)
    oracle = build_kbd(b, mu)
    adj = adj_naive(b)
    for _ in range(20):
        i, j = (int(x) for x in rng.integers(0, 8, size=2))
        assert query_entry(oracle, i, j) == adj.entry(i, j)


def test_query_row_examples():
    oracle = build_kbd(PolyMatrix.identity(FIELD, 4))
    e2 = [Poly.constant(FIELD, int(k == 2)) for k in range(4)]
    assert query_row(oracle, e2) == e2
    zero = [Poly.zero(FIELD)] * 4
    assert query_row(oracle, zero) == zero
    with pytest.raises(ValueError):
        query_row(oracle, zero[:3])


def test_query_row_matches_naive_adjoint():
    rng = np.random.default_rng(41)
    b = rand_nonsingular(rng, 6, 2)
    v = [Poly(FIELD, rng.integers(0, P, size=3, dtype=np.uint64)) for _ in range(6)]
    assert query_row(build_kbd(b), v) == pm_vec_mul(v, adj_naive(b))


@settings(max_examples=12, deadline=None)
@given(st.integers(2, 9), st.integers(0, 2), st.integers(0, 2**32))
def test_chain_invariants(n, d, seed):
    rng = np.random.default_rng(seed)
    b = rand_nonsingular(rng, n, d)
    oracle = build_chain(b)
    assert check_chain_identity(oracle, b)
    assert check_divisibility(oracle)
    assert all(not e.is_zero() for e in oracle.diagonal)
    assert degree_report(oracle).ok()
    answers = {mu: build_prefix(oracle, mu) for mu in (0.0, 0.25, 0.5, 0.75, 1.0)}
    i, j = (int(x) for x in rng.integers(0, n, size=2))
    results = {query_entry(o, i, j) for o in answers.values()}
    assert len(results) == 1


def test_custom_shift_is_validated():
    b = rand_nonsingular(np.random.default_rng(6), 3, 2)
    with pytest.raises(ValueError):
        build_chain(b, [1, 1, 1])
    oracle = build_chain(b, [3, 2, 2])
    assert oracle.shift == (3, 2, 2)
    assert check_chain_identity(oracle, b)
