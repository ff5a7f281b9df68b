"""Kernel basis decomposition of a non-singular polynomial matrix.

For ``B`` (n x n) the decomposition is a chain of block-diagonal matrices
``A_1, ..., A_L`` (``L = ceil(log2 n)``) with ``B A_1 ... A_L = diag(D)``.
Each diagonal block of ``A_i`` is ``[N_l | N_r]`` where ``N_l`` is a minimal
kernel basis of the bottom rows of the current block and ``N_r`` one of the
top rows, so the product splits every block into two independent halves.
Then ``adj(B) = (A_1 ... A_L) D^{-1} det(B)``, which gives single entries
and row-vector products of the adjoint without ever forming it.

A prefix ``A_1 ... A_k`` with ``2**k ~ n**mu`` may be precomputed to trade
preprocessing work for cheaper entry queries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .algebra import kernels
from .algebra.field import FieldConfig
from .algebra.poly import NEG_INF, Poly, eval_coeffs_many, poly_exact_div
from .errors import InvariantError, RankDegeneracyError, SingularMatrixError
from .pmat import PolyMatrix, block_diag, det_poly, hstack, pm_mul

Shift = Sequence[int]


def cdeg_shifted(m: PolyMatrix, shift: Shift) -> list[int | float]:
    """Shifted column degrees ``max_i shift[i] + deg(m[i, j])``; -inf for zero columns."""
    if len(shift) != m.rows:
        raise ValueError(f"shift has length {len(shift)}, matrix has {m.rows} rows")
    degs = m.entry_degrees()
    out: list[int | float] = []
    s = np.asarray(shift, dtype=np.int64).reshape(-1, 1) if m.rows else np.zeros((0, 1), np.int64)
    shifted = np.where(degs >= 0, degs + s, np.iinfo(np.int64).min)
    for j in range(m.cols):
        col = shifted[:, j]
        best = int(col.max()) if col.size else np.iinfo(np.int64).min
        out.append(NEG_INF if best == np.iinfo(np.int64).min else best)
    return out


def _normalize_columns(n: np.ndarray, shift: np.ndarray, p: int) -> np.ndarray:
    """Scale each column so the last entry attaining its shifted degree is monic."""
    m, k, length = n.shape
    if k == 0 or length == 0:
        return n
    nz = n != 0
    last = length - 1 - np.argmax(nz[:, :, ::-1], axis=2)
    degs = np.where(nz.any(axis=2), last + shift[:, None], -(1 << 40))
    out = n.copy()
    for j in range(k):
        col = degs[:, j]
        i = int(np.flatnonzero(col == col.max())[-1])
        lead = int(n[i, j, last[i, j]])
        if lead != 1:
            out[:, j] = kernels.mulmod(n[:, j], np.uint64(pow(lead, p - 2, p)), p)
    return out


def _batched_rref(res: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Row-reduce a stack ``(batch, r, m)`` column by column.

    Returns the reduced stack, the pivot flag of every column and, for each
    pivot row, the column it pivots (``-1`` past the rank).
    """
    batch, r, m = res.shape
    res = res.copy()
    rank = np.zeros(batch, dtype=np.int64)
    is_pivot = np.zeros((batch, m), dtype=bool)
    pivot_col = np.full((batch, r), -1, dtype=np.int64)
    rows = np.arange(r)
    for t in range(m):
        cand = (res[:, :, t] != 0) & (rows[None, :] >= rank[:, None])
        has = np.flatnonzero(cand.any(axis=1))
        if has.size == 0:
            continue
        src = cand[has].argmax(axis=1)
        dst = rank[has]
        moved = res[has, dst].copy()
        res[has, dst] = res[has, src]
        res[has, src] = moved
        inv = kernels.inv_vec(res[has, dst, t], p)
        prow = kernels.mulmod(res[has, dst], inv[:, None], p)
        res[has, dst] = prow
        factors = res[has, :, t].copy()
        factors[np.arange(has.size), dst] = 0
        res[has] = kernels.submod(res[has], kernels.mulmod(factors[:, :, None], prow[:, None, :], p), p)
        pivot_col[has, dst] = t
        is_pivot[has, t] = True
        rank[has] += 1
    return res, is_pivot, pivot_col


def _order_basis_kernels(
    problems: Sequence[tuple[np.ndarray, np.ndarray]], r: int, m: int, p: int
) -> list[np.ndarray]:
    """Kernel bases of same-shape blocks via shifted minimal order bases.

    Each problem is ``(coeffs (r, m, len), shift (m,))``.  At order ``k`` the
    coefficient of ``X**k`` in ``F @ P`` is eliminated by combining columns of
    ``P`` in order of their shifted degree; the columns that stay independent
    are multiplied by ``X``.  Once ``m - r`` columns of ``P`` have shifted
    degree below the order they are exact kernel vectors, and together form a
    minimal kernel basis.  All problems advance in lockstep.
    """
    need = m - r
    count = len(problems)
    lf = max(c.shape[2] for c, _ in problems)
    fc = np.zeros((count, r, m, lf), dtype=np.uint64)
    shift = np.zeros((count, m), dtype=np.int64)
    for b, (c, s) in enumerate(problems):
        fc[b, :, :, : c.shape[2]] = c
        shift[b] = s
    limit = shift.sum(axis=1) + shift.max(axis=1) + 2
    basis = np.zeros((count, m, m, 8), dtype=np.uint64)
    basis[:, np.arange(m), np.arange(m), 0] = 1
    plen = 1
    delta = shift.copy()
    ids = np.arange(count)
    results: list[np.ndarray | None] = [None] * count
    col_idx = np.broadcast_to(np.arange(m), (count, m))
    order = 0
    while ids.size:
        batch = ids.size
        lo = max(0, order - plen + 1)
        hi = min(lf, order + 1)
        if lo < hi:
            # residual = sum_a F_a @ P_{order - a}
            fa = fc[:, :, :, lo:hi].transpose(0, 1, 3, 2).reshape(batch, r, (hi - lo) * m)
            idx = order - np.arange(lo, hi)
            pa = basis[:, :, :, idx].transpose(0, 3, 1, 2).reshape(batch, (hi - lo) * m, m)
            residual = kernels.matmul_mod(fa, pa, p)
        else:
            residual = np.zeros((batch, r, m), dtype=np.uint64)
        perm = np.lexsort((col_idx[:batch], delta), axis=1)
        bidx = np.arange(batch)[:, None]
        red, is_pivot, pivot_col = _batched_rref(
            np.take_along_axis(residual, perm[:, None, :], axis=2), p
        )
        # dependent column c receives -red[q, c] times the pivot column of row q
        piv_orig = np.where(pivot_col >= 0, np.take_along_axis(perm, np.maximum(pivot_col, 0), axis=1), -1)
        coefs = []
        for q in range(r):
            valid = pivot_col[:, q] >= 0
            if not valid.any():
                break
            coef_sorted = np.where(~is_pivot & valid[:, None], kernels.negmod(red[:, q], p), np.uint64(0))
            coef = np.zeros((batch, m), dtype=np.uint64)
            coef[bidx, perm] = coef_sorted
            if coef.any():
                coefs.append((q, coef))
        if coefs and r * m <= 64:
            for q, coef in coefs:
                src = basis[np.arange(batch), :, np.maximum(piv_orig[:, q], 0), :plen]
                upd = kernels.mulmod(src[:, :, None, :], coef[:, None, :, None], p)
                basis[..., :plen] = kernels.addmod(basis[..., :plen], upd, p).reshape(upd.shape)
        elif coefs:
            trans = np.zeros((batch, m, m), dtype=np.uint64)
            trans[:, np.arange(m), np.arange(m)] = 1
            for q, coef in coefs:
                rows = np.maximum(piv_orig[:, q], 0)
                trans[np.arange(batch), rows] = kernels.addmod(trans[np.arange(batch), rows], coef, p)
            prod = kernels.matmul_mod(basis[..., :plen].transpose(0, 3, 1, 2), trans[:, None], p)
            basis[..., :plen] = prod.transpose(0, 2, 3, 1)
        grow = np.zeros((batch, m), dtype=bool)
        grow[bidx, perm] = is_pivot
        if grow.any():
            if plen + 1 > basis.shape[3]:
                bigger = np.zeros(basis.shape[:3] + (2 * basis.shape[3],), dtype=np.uint64)
                bigger[..., :plen] = basis[..., :plen]
                basis = bigger
            shifted = np.zeros(basis.shape[:3] + (plen + 1,), dtype=np.uint64)
            shifted[..., 1:] = basis[..., :plen]
            basis[..., : plen + 1] = np.where(grow[:, None, :, None], shifted, basis[..., : plen + 1])
            plen += 1
            delta = delta + grow
        order += 1
        cur = basis[..., :plen]
        nz = cur != 0
        last = plen - 1 - np.argmax(nz[..., ::-1], axis=3)
        degs = np.where(nz.any(axis=3), last + shift[:, :, None], -(1 << 40))
        found = degs.max(axis=1) < order
        nfound = found.sum(axis=1)
        if (nfound > need).any():
            raise RankDegeneracyError(
                f"kernel of a {r}x{m} block has dimension > {need}; rows are not independent"
            )
        done = nfound == need
        if (~done & (order >= limit)).any():
            raise RankDegeneracyError(f"no kernel basis of dimension {need} within the order bound")
        if done.any():
            for b in np.flatnonzero(done):
                results[ids[b]] = cur[b][:, found[b]].copy()
            keep = ~done
            ids, fc, shift, basis, delta, limit = (
                ids[keep], fc[keep], shift[keep], basis[keep], delta[keep], limit[keep]
            )
    return results


def _check_kernel(bpart: PolyMatrix, n: PolyMatrix, s: np.ndarray) -> None:
    if not pm_mul(bpart, n).is_zero():
        raise InvariantError("kernel basis does not annihilate the block")
    total = sum(cdeg_shifted(n, s))
    if total > int(s.sum()):
        raise InvariantError(
            f"kernel basis shifted degree sum {total} exceeds bound {int(s.sum())}"
        )


# fixed evaluation points for the full-row-rank test
_RANK_PROBES = (0x9E3779B97F4A7C15, 0x2545F4914F6CDD1D, 12345678910111213)


def _require_full_row_rank(coeffs: np.ndarray, p: int) -> None:
    """Raise unless every ``coeffs[b]`` (r x m x L) has full row rank over Z_p(X).

    Rank at any point is a lower bound on the generic rank, so one point with
    rank r settles the question; failing all probes means rank deficiency
    with overwhelming probability.
    """
    r = coeffs.shape[1]
    pending = np.arange(coeffs.shape[0])
    for x in _RANK_PROBES:
        vals = eval_coeffs_many(coeffs[pending], np.array([x % p], dtype=np.uint64), p)[..., 0]
        _, _, pivot_col = _batched_rref(vals, p)
        pending = pending[(pivot_col >= 0).sum(axis=1) < r]
        if pending.size == 0:
            return
    raise RankDegeneracyError("block does not have full row rank")


def _kernel_bases(requests: Sequence[tuple[PolyMatrix, np.ndarray]]) -> list[PolyMatrix]:
    """Minimal kernel bases for many blocks, batching blocks of equal shape."""
    out: list[PolyMatrix | None] = [None] * len(requests)
    groups: dict[tuple[int, int], list[int]] = {}
    for k, (f, _) in enumerate(requests):
        if f.rows == 0:
            out[k] = PolyMatrix.identity(f.field, f.cols)
        elif f.is_zero():
            raise RankDegeneracyError("zero block has no full row rank")
        else:
            groups.setdefault(f.shape, []).append(k)
    for (r, m), members in groups.items():
        field = requests[members[0]][0].field
        length = max(requests[k][0].length for k in members)
        _require_full_row_rank(np.stack([requests[k][0].padded(length) for k in members]), field.p)
        raw = _order_basis_kernels(
            [(requests[k][0].coeffs, requests[k][1]) for k in members], r, m, field.p
        )
        for k, arr in zip(members, raw):
            f, s = requests[k]
            n = PolyMatrix(field, _normalize_columns(arr, s, field.p))
            _check_kernel(f, n, s)
            out[k] = n
    return out


def minimal_kernel_basis(bpart: PolyMatrix, shift: Shift) -> PolyMatrix:
    """Shift-minimal basis ``N`` of the right kernel of ``bpart``.

    ``bpart`` (r x m) must have full row rank and ``shift`` must bound its
    column degrees.  Returns ``N`` (m x (m - r)) with ``bpart @ N = 0`` and
    ``sum(cdeg_shifted(N, shift)) <= sum(shift)``.
    """
    r, m = bpart.shape
    s = np.asarray([int(x) for x in shift], dtype=np.int64)
    if len(s) != m:
        raise ValueError(f"shift has length {len(s)}, block has {m} columns")
    if r > m:
        raise RankDegeneracyError(f"{r}x{m} block cannot have a kernel of dimension {m - r}")
    cdeg = bpart.col_degree_bound
    if any(c != NEG_INF and c > sj for c, sj in zip(cdeg, s)):
        raise ValueError("shift must bound the column degrees of the block")
    return _kernel_bases([(bpart, s)])[0]


# ---------------------------------------------------------------------------
# chain


@dataclass(frozen=True)
class KernelBlock:
    """One diagonal block ``[N_l | N_r]`` of a chain level.

    ``offset`` and ``size`` locate the block on the diagonal, ``split`` is the
    number of ``N_l`` columns.  ``shift`` bounds the column degrees of the
    block of ``B A_1 ... A_{i-1}`` it was computed from.
    """

    offset: int
    size: int
    split: int
    matrix: PolyMatrix
    shift: tuple[int, ...]
    left_degree_sum: int
    right_degree_sum: int

    @property
    def degree_sum(self) -> int:
        """``sum(cdeg_shift)`` over all columns of the block."""
        return self.left_degree_sum + self.right_degree_sum

    def half(self, j: int) -> tuple[PolyMatrix, int, int]:
        """The half (``N_l`` or ``N_r``) holding global column ``j`` and its column range."""
        if j < self.offset + self.split:
            return self.matrix[:, : self.split], self.offset, self.split
        return self.matrix[:, self.split :], self.offset + self.split, self.size - self.split


@dataclass(frozen=True)
class BlockDiagonalLevel:
    index: int
    blocks: tuple[KernelBlock, ...]

    @property
    def boundaries(self) -> list[tuple[int, int]]:
        return [(b.offset, b.offset + b.size) for b in self.blocks]

    def block_of(self, j: int) -> KernelBlock:
        lo, hi = 0, len(self.blocks)
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self.blocks[mid].offset <= j:
                lo = mid
            else:
                hi = mid
        return self.blocks[lo]

    def as_matrix(self) -> PolyMatrix:
        return block_diag([b.matrix for b in self.blocks])


@dataclass(frozen=True)
class KbdOracle:
    """Adjoint oracle for a non-singular ``B``.

    ``prefix`` holds ``A_1 ... A_k`` for ``k = prefix_levels`` (``None`` when
    ``k = 0``); its columns are grouped by the blocks of level ``k + 1``.
    """

    field: FieldConfig
    n: int
    d: int
    shift: tuple[int, ...]
    levels: tuple[BlockDiagonalLevel, ...]
    diagonal: tuple[Poly, ...]
    det: Poly
    mu: float = 0.0
    prefix_levels: int = 0
    prefix: PolyMatrix | None = field(default=None, repr=False)

    @property
    def depth(self) -> int:
        return len(self.levels)

    def prefix_product(self) -> PolyMatrix:
        """``A_1 ... A_k`` (the identity when ``k = 0``)."""
        if self.prefix is None:
            return PolyMatrix.identity(self.field, self.n)
        return self.prefix

    def partition(self, level: int) -> list[tuple[int, int]]:
        """Column blocks ``[lo, hi)`` of level ``level`` (1-based); ``depth + 1`` gives singletons."""
        if level <= self.depth:
            return self.levels[level - 1].boundaries
        return [(j, j + 1) for j in range(self.n)]


def chain_depth(n: int) -> int:
    return math.ceil(math.log2(n)) if n > 1 else 0


def build_chain(b: PolyMatrix, shift: Shift | None = None) -> KbdOracle:
    """Kernel basis decomposition of ``b`` (without a prefix)."""
    if b.rows != b.cols:
        raise ValueError(f"square matrix required, got {b.shape}")
    n = b.rows
    field = b.field
    det = det_poly(b)
    if det.is_zero():
        raise SingularMatrixError("matrix is singular")
    if shift is None:
        shift = [int(c) for c in b.col_degree_bound]
    shift = tuple(int(x) for x in shift)
    if len(shift) != n:
        raise ValueError(f"shift has length {len(shift)}, matrix has {n} columns")
    if any(c != NEG_INF and c > s for c, s in zip(b.col_degree_bound, shift)):
        raise ValueError("shift must bound the column degrees of the matrix")
    d = max(b.length - 1, 0)

    # current diagonal blocks of B A_1 ... A_i: (offset, matrix, shift)
    current: list[tuple[int, PolyMatrix, tuple[int, ...]]] = [(0, b, shift)]
    levels: list[BlockDiagonalLevel] = []
    for index in range(1, chain_depth(n) + 1):
        requests: list[tuple[PolyMatrix, np.ndarray]] = []
        for _, g, t in current:
            if g.rows > 1:
                h = (g.rows + 1) // 2
                ts = np.asarray(t, dtype=np.int64)
                requests += [(g[h:, :], ts), (g[:h, :], ts)]
        bases = iter(_kernel_bases(requests))
        blocks: list[KernelBlock] = []
        nxt: list[tuple[int, PolyMatrix, tuple[int, ...]]] = []
        for offset, g, t in current:
            m = g.rows
            if m == 1:
                one = PolyMatrix.identity(field, 1)
                blocks.append(KernelBlock(offset, 1, 1, one, t, t[0], 0))
                nxt.append((offset, g, t))
                continue
            h = (m + 1) // 2
            n_left, n_right = next(bases), next(bases)
            if n_left.cols != h or n_right.cols != m - h:
                raise RankDegeneracyError("kernel bases have unexpected dimensions")
            t_left = tuple(int(x) for x in cdeg_shifted(n_left, t))
            t_right = tuple(int(x) for x in cdeg_shifted(n_right, t))
            blocks.append(
                KernelBlock(offset, m, h, hstack([n_left, n_right]), t, sum(t_left), sum(t_right))
            )
            nxt.append((offset, pm_mul(g[:h, :], n_left), t_left))
            nxt.append((offset + h, pm_mul(g[h:, :], n_right), t_right))
        levels.append(BlockDiagonalLevel(index, tuple(blocks)))
        current = nxt
    diagonal = tuple(g.entry(0, 0) for _, g, _ in current)
    if any(e.is_zero() for e in diagonal):
        raise SingularMatrixError("zero diagonal entry in the decomposition")
    return KbdOracle(field, n, d, shift, tuple(levels), diagonal, det)


def prefix_depth(n: int, mu: float) -> int:
    """``ceil(log2(n**mu))`` clamped to ``[0, depth]``."""
    if not 0.0 <= mu <= 1.0:
        raise ValueError(f"mu must lie in [0, 1], got {mu}")
    if n <= 1:
        return 0
    k = math.ceil(mu * math.log2(n) - 1e-9)
    return max(0, min(k, chain_depth(n)))


def _apply_level(m: PolyMatrix, level: BlockDiagonalLevel) -> PolyMatrix:
    """``m @ A_level`` using the block-diagonal structure."""
    return hstack(
        [pm_mul(m[:, blk.offset : blk.offset + blk.size], blk.matrix) for blk in level.blocks]
    )


def build_prefix(oracle: KbdOracle, mu: float) -> KbdOracle:
    """Attach ``A_1 ... A_k`` with ``k = ceil(log2(n**mu))``."""
    k = prefix_depth(oracle.n, mu)
    prefix = None
    for level in oracle.levels[:k]:
        prefix = level.as_matrix() if prefix is None else _apply_level(prefix, level)
    return replace(oracle, mu=mu, prefix_levels=k, prefix=prefix)


def build_kbd(b: PolyMatrix, mu: float = 0.0, shift: Shift | None = None) -> KbdOracle:
    """Decomposition plus prefix in one call."""
    return build_prefix(build_chain(b, shift), mu)


def _finish(oracle: KbdOracle, value: Poly, j: int) -> Poly:
    return poly_exact_div(value * oracle.det, oracle.diagonal[j])


def chain_entry(oracle: KbdOracle, i: int, j: int) -> Poly:
    """Entry ``(i, j)`` of ``A_1 ... A_L`` through the prefix and masked blocks."""
    n = oracle.n
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"entry ({i}, {j}) outside {n}x{n}")
    k = oracle.prefix_levels
    if oracle.prefix is None:
        row = PolyMatrix.from_scalar(oracle.field, np.eye(1, n, i, dtype=np.uint64))
    else:
        lo, hi = next(r for r in oracle.partition(k + 1) if r[0] <= j < r[1])
        row = oracle.prefix[i : i + 1, lo:hi]
    for level in oracle.levels[k:]:
        half, _, _ = level.block_of(j).half(j)
        row = pm_mul(row, half)
    return row.entry(0, 0)


def query_entry(oracle: KbdOracle, i: int, j: int) -> Poly:
    """``adj(B)[i, j]`` (0-based indices)."""
    return _finish(oracle, chain_entry(oracle, i, j), j)


def query_row(oracle: KbdOracle, v: Sequence[Poly | int]) -> list[Poly]:
    """Row vector ``v^T adj(B)`` computed left to right through the chain."""
    n = oracle.n
    if len(v) != n:
        raise ValueError(f"vector has length {len(v)}, expected {n}")
    row = PolyMatrix.from_polys(oracle.field, [list(v)])
    if row.is_zero():
        return [Poly.zero(oracle.field)] * n
    for level in oracle.levels:
        row = _apply_level(row, level)
    return [_finish(oracle, row.entry(0, j), j) for j in range(n)]


def chain_product(oracle: KbdOracle) -> PolyMatrix:
    """Full product ``A_1 ... A_L``."""
    out = PolyMatrix.identity(oracle.field, oracle.n)
    for level in oracle.levels:
        out = _apply_level(out, level)
    return out


def check_chain_identity(oracle: KbdOracle, b: PolyMatrix) -> bool:
    """Whether ``b @ A_1 ... A_L`` equals ``diag(D)`` exactly."""
    lhs = pm_mul(b, chain_product(oracle))
    n = oracle.n
    length = max([lhs.length] + [len(e) for e in oracle.diagonal])
    diag = np.zeros((n, n, length), dtype=np.uint64)
    for j, e in enumerate(oracle.diagonal):
        diag[j, j, : len(e)] = e.coeffs
    return lhs == PolyMatrix(oracle.field, diag)


def check_divisibility(oracle: KbdOracle) -> bool:
    """Whether every ``D[j]`` divides column ``j`` of ``(A_1 ... A_L) det(B)``."""
    prod = chain_product(oracle)
    try:
        for j in range(oracle.n):
            for i in range(oracle.n):
                _finish(oracle, prod.entry(i, j), j)
    except InvariantError:
        return False
    return True


@dataclass(frozen=True)
class DegreeReport:
    """Shifted-degree sums of every chain block against the global bound."""

    bound: int
    factor_sums: tuple[int, ...]
    block_sums: tuple[int, ...]

    def ok(self) -> bool:
        return all(s <= self.bound for s in self.factor_sums) and all(
            s <= 2 * self.bound for s in self.block_sums
        )


def degree_report(oracle: KbdOracle) -> DegreeReport:
    factors: list[int] = []
    blocks: list[int] = []
    for level in oracle.levels:
        for blk in level.blocks:
            if blk.size == 1:
                continue
            factors.extend([blk.left_degree_sum, blk.right_degree_sum])
            blocks.append(blk.degree_sum)
    return DegreeReport(sum(oracle.shift), tuple(factors), tuple(blocks))
