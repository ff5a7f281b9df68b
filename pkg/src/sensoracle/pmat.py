"""Dense polynomial matrices over Z_p and exact scalar linear algebra.

A :class:`PolyMatrix` stores its coefficients as a ``(rows, cols, length)``
uint64 array, entry ``(i, j)`` being ``sum_k coeffs[i, j, k] * X**k``.
Products go through BLAS-backed modular matrix multiplication; determinants
and adjoints use evaluation at roots of unity, batched LU factorisation and
inverse transforms.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .algebra import kernels
from .algebra.field import FieldConfig, FieldElement
from .algebra.poly import NEG_INF, Poly, eval_coeffs_many

ScalarMatrix = np.ndarray
"""Square or rectangular uint64 array of canonical residues."""

# below this many columns LU and triangular inverses run column by column
_SMALL_BLOCK = 16
# cap on points * n * n per batched factorisation, bounds peak memory
_BATCH_ELEMENTS = 1 << 21
# Toeplitz expansion is used while the expanded operand stays this small
_TOEPLITZ_ELEMENTS = 1 << 22


def _trim_last(coeffs: np.ndarray) -> np.ndarray:
    if coeffs.shape[-1] == 0:
        return coeffs
    nz = np.flatnonzero(coeffs.reshape(-1, coeffs.shape[-1]).any(axis=0))
    length = int(nz[-1]) + 1 if nz.size else 0
    return coeffs[..., :length]


class PolyMatrix:
    """Immutable dense matrix of polynomials."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: FieldConfig, coeffs: np.ndarray):
        arr = np.asarray(coeffs)
        if arr.ndim != 3:
            raise ValueError(f"coefficient array must be 3-d, got shape {arr.shape}")
        if arr.dtype != np.uint64:
            arr = kernels.as_residues(arr, field.p).reshape(arr.shape)
        arr = np.ascontiguousarray(_trim_last(arr))
        arr.setflags(write=False)
        self.field = field
        self.coeffs = arr

    # constructors -------------------------------------------------------

    @classmethod
    def zeros(cls, field: FieldConfig, rows: int, cols: int) -> PolyMatrix:
        return cls(field, np.zeros((rows, cols, 0), dtype=np.uint64))

    @classmethod
    def identity(cls, field: FieldConfig, n: int) -> PolyMatrix:
        return cls.from_scalar(field, np.eye(n, dtype=np.uint64))

    @classmethod
    def from_scalar(cls, field: FieldConfig, values) -> PolyMatrix:
        arr = np.asarray(values)
        if arr.dtype != np.uint64:
            arr = kernels.as_residues(arr, field.p).reshape(arr.shape)
        return cls(field, arr[:, :, None])

    @classmethod
    def from_polys(cls, field: FieldConfig, grid: Sequence[Sequence[Poly | int]]) -> PolyMatrix:
        rows = len(grid)
        cols = len(grid[0]) if rows else 0
        polys = [[e if isinstance(e, Poly) else Poly.constant(field, e) for e in row] for row in grid]
        if any(len(row) != cols for row in polys):
            raise ValueError("ragged polynomial grid")
        length = max((len(e) for row in polys for e in row), default=0)
        arr = np.zeros((rows, cols, length), dtype=np.uint64)
        for i, row in enumerate(polys):
            for j, e in enumerate(row):
                arr[i, j, : len(e)] = e.coeffs
        return cls(field, arr)

    @classmethod
    def from_lists(cls, field: FieldConfig, grid: Sequence[Sequence[Iterable[int]]]) -> PolyMatrix:
        """Build from nested lists of coefficient lists (constant term first)."""
        return cls.from_polys(field, [[Poly(field, c) for c in row] for row in grid])

    # shape and degrees --------------------------------------------------

    @property
    def rows(self) -> int:
        return self.coeffs.shape[0]

    @property
    def cols(self) -> int:
        return self.coeffs.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.coeffs.shape[0], self.coeffs.shape[1]

    @property
    def length(self) -> int:
        """One more than the largest entry degree (0 for the zero matrix)."""
        return self.coeffs.shape[2]

    @property
    def degree(self) -> int | float:
        return self.length - 1 if self.length else NEG_INF

    def is_zero(self) -> bool:
        return self.length == 0

    def is_scalar(self) -> bool:
        return self.length <= 1

    def entry_degrees(self) -> np.ndarray:
        """Integer array of entry degrees, -1 marking zero entries."""
        if self.length == 0:
            return np.full(self.shape, -1, dtype=np.int64)
        nz = self.coeffs != 0
        last = self.length - 1 - np.argmax(nz[:, :, ::-1], axis=2)
        return np.where(nz.any(axis=2), last, -1).astype(np.int64)

    @property
    def col_degree_bound(self) -> list[int | float]:
        """Column degrees ``max_i deg(entry(i, j))``; -inf for zero columns."""
        degs = self.entry_degrees()
        if self.rows == 0:
            return [NEG_INF] * self.cols
        best = degs.max(axis=0)
        return [int(d) if d >= 0 else NEG_INF for d in best]

    # access -------------------------------------------------------------

    def entry(self, i: int, j: int) -> Poly:
        return Poly(self.field, self.coeffs[i, j])

    def __getitem__(self, key):
        """``m[i, j]`` is a :class:`Poly`; slices or index lists give a submatrix."""
        r, c = key
        if isinstance(r, (int, np.integer)) and isinstance(c, (int, np.integer)):
            return self.entry(r, c)
        r = [r] if isinstance(r, (int, np.integer)) else r
        c = [c] if isinstance(c, (int, np.integer)) else c
        return PolyMatrix(self.field, self.coeffs[r][:, c])

    def to_polys(self) -> list[list[Poly]]:
        return [[self.entry(i, j) for j in range(self.cols)] for i in range(self.rows)]

    def to_lists(self) -> list[list[list[int]]]:
        return [[self.entry(i, j).to_list() for j in range(self.cols)] for i in range(self.rows)]

    def padded(self, length: int) -> np.ndarray:
        """Coefficient array zero-padded (never truncated) to ``length``."""
        length = max(length, self.length)
        out = np.zeros(self.shape + (length,), dtype=np.uint64)
        out[:, :, : self.length] = self.coeffs
        return out

    @property
    def T(self) -> PolyMatrix:
        return PolyMatrix(self.field, self.coeffs.transpose(1, 0, 2))

    # arithmetic ---------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return (
            self.field.p == other.field.p
            and self.coeffs.shape == other.coeffs.shape
            and bool(np.array_equal(self.coeffs, other.coeffs))
        )

    def __hash__(self) -> int:
        return hash((self.field.p, self.coeffs.shape, self.coeffs.tobytes()))

    def __repr__(self) -> str:
        return f"PolyMatrix({self.rows}x{self.cols}, degree={self.degree})"

    def _aligned(self, other: PolyMatrix) -> tuple[np.ndarray, np.ndarray]:
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch: {self.shape} vs {other.shape}")
        length = max(self.length, other.length)
        return self.padded(length), other.padded(length)

    def __add__(self, other: PolyMatrix) -> PolyMatrix:
        a, b = self._aligned(other)
        return PolyMatrix(self.field, kernels.addmod(a, b, self.field.p).reshape(a.shape))

    def __sub__(self, other: PolyMatrix) -> PolyMatrix:
        a, b = self._aligned(other)
        return PolyMatrix(self.field, kernels.submod(a, b, self.field.p).reshape(a.shape))

    def __neg__(self) -> PolyMatrix:
        return PolyMatrix(self.field, kernels.negmod(self.coeffs, self.field.p))

    def __matmul__(self, other: PolyMatrix) -> PolyMatrix:
        return pm_mul(self, other)

    def scale(self, c: Poly | int) -> PolyMatrix:
        """Multiply every entry by the polynomial (or constant) ``c``."""
        if not isinstance(c, Poly):
            c = Poly.constant(self.field, c)
        if c.is_zero() or self.is_zero():
            return PolyMatrix.zeros(self.field, self.rows, self.cols)
        return pm_mul(self, PolyMatrix(self.field, c.coeffs[None, None, :]).broadcast_diag(self.cols))

    def broadcast_diag(self, n: int) -> PolyMatrix:
        """``c * I_n`` from a 1x1 matrix ``[[c]]``."""
        out = np.zeros((n, n, self.length), dtype=np.uint64)
        idx = np.arange(n)
        out[idx, idx] = self.coeffs[0, 0]
        return PolyMatrix(self.field, out)


def hstack(blocks: Sequence[PolyMatrix]) -> PolyMatrix:
    field = blocks[0].field
    length = max(b.length for b in blocks)
    return PolyMatrix(field, np.concatenate([b.padded(length) for b in blocks], axis=1))


def vstack(blocks: Sequence[PolyMatrix]) -> PolyMatrix:
    field = blocks[0].field
    length = max(b.length for b in blocks)
    return PolyMatrix(field, np.concatenate([b.padded(length) for b in blocks], axis=0))


def block_diag(blocks: Sequence[PolyMatrix]) -> PolyMatrix:
    field = blocks[0].field
    rows = sum(b.rows for b in blocks)
    cols = sum(b.cols for b in blocks)
    length = max(b.length for b in blocks)
    out = np.zeros((rows, cols, length), dtype=np.uint64)
    r = c = 0
    for b in blocks:
        out[r : r + b.rows, c : c + b.cols, : b.length] = b.coeffs
        r += b.rows
        c += b.cols
    return PolyMatrix(field, out)


# ---------------------------------------------------------------------------
# products


def _mul_toeplitz(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Product with ``a`` flattened over (inner, degree) and ``b`` expanded."""
    r, m, la = a.shape
    _, c, lb = b.shape
    lc = la + lb - 1
    expanded = np.zeros((m, la, c, lc), dtype=np.uint64)
    for s in range(la):
        expanded[:, s, :, s : s + lb] = b
    flat = kernels.matmul_mod(a.reshape(r, m * la), expanded.reshape(m * la, c * lc), p)
    return flat.reshape(r, c, lc)


def _mul_pointwise(a: np.ndarray, b: np.ndarray, field: FieldConfig) -> np.ndarray:
    """Product by transforming to point values and multiplying per point."""
    p = field.p
    lc = a.shape[2] + b.shape[2] - 1
    size = 1 << max(lc - 1, 0).bit_length()
    omega = field.root_of_unity(size)
    fa = np.zeros(a.shape[:2] + (size,), dtype=np.uint64)
    fa[:, :, : a.shape[2]] = a
    fb = np.zeros(b.shape[:2] + (size,), dtype=np.uint64)
    fb[:, :, : b.shape[2]] = b
    va = kernels.ntt(fa, p, omega).transpose(2, 0, 1)
    vb = kernels.ntt(fb, p, omega).transpose(2, 0, 1)
    vc = kernels.matmul_mod(va, vb, p).transpose(1, 2, 0)
    return kernels.ntt(np.ascontiguousarray(vc), p, omega, inverse=True)[:, :, :lc]


def pm_mul(a: PolyMatrix, b: PolyMatrix) -> PolyMatrix:
    """Exact product of polynomial matrices."""
    if a.cols != b.rows:
        raise ValueError(f"inner dimensions differ: {a.shape} @ {b.shape}")
    field = a.field
    r, c = a.rows, b.cols
    if a.is_zero() or b.is_zero() or a.cols == 0:
        return PolyMatrix.zeros(field, r, c)
    la, lb = a.length, b.length
    m = a.cols
    if la == 1 and lb == 1:
        out = kernels.matmul_mod(a.coeffs[:, :, 0], b.coeffs[:, :, 0], field.p)[:, :, None]
    elif la <= lb and m * la * c * (la + lb) <= _TOEPLITZ_ELEMENTS:
        out = _mul_toeplitz(a.coeffs, b.coeffs, field.p)
    elif lb < la and m * lb * r * (la + lb) <= _TOEPLITZ_ELEMENTS:
        # (A B)^T = B^T A^T keeps the expansion on the long operand
        out = _mul_toeplitz(
            b.coeffs.transpose(1, 0, 2), a.coeffs.transpose(1, 0, 2), field.p
        ).transpose(1, 0, 2)
    else:
        out = _mul_pointwise(a.coeffs, b.coeffs, field)
    return PolyMatrix(field, out)


def pm_vec_mul(v: Sequence[Poly], b: PolyMatrix) -> list[Poly]:
    """Row vector times matrix."""
    if len(v) != b.rows:
        raise ValueError(f"vector length {len(v)} does not match {b.rows} rows")
    row = PolyMatrix.from_polys(b.field, [list(v)]) if v else PolyMatrix.zeros(b.field, 1, 0)
    prod = pm_mul(row, b)
    return [prod.entry(0, j) for j in range(prod.cols)]


def pm_eval(a: PolyMatrix, x: FieldElement) -> ScalarMatrix:
    """Entry-wise evaluation at ``x``."""
    if a.length == 0:
        return np.zeros(a.shape, dtype=np.uint64)
    xs = np.array([int(x) % a.field.p], dtype=np.uint64)
    return eval_coeffs_many(a.coeffs, xs, a.field.p)[:, :, 0]


def _values_at_roots(coeffs: np.ndarray, size: int, field: FieldConfig) -> np.ndarray:
    """Values at ``omega**k`` for k < size, shape ``(size,) + coeffs.shape[:-1]``."""
    p = field.p
    omega = field.root_of_unity(size)
    length = coeffs.shape[-1]
    lead = coeffs.shape[:-1]
    if length == 0:
        return np.zeros((size,) + lead, dtype=np.uint64)
    if length <= 2 * max(size.bit_length(), 1):
        xs = kernels.powers(omega, size, p)
        vander = np.empty((length, size), dtype=np.uint64)
        vander[0] = 1
        for k in range(1, length):
            vander[k] = kernels.mulmod(vander[k - 1], xs, p)
        vals = kernels.matmul_mod(coeffs.reshape(-1, length), vander, p)
    else:
        padded = np.zeros(lead + (size,), dtype=np.uint64)
        padded[..., :length] = coeffs
        vals = kernels.ntt(padded.reshape(-1, size), p, omega)
    return np.ascontiguousarray(vals.T).reshape((size,) + lead)


def _from_values_at_roots(values: np.ndarray, field: FieldConfig) -> np.ndarray:
    """Inverse of :func:`_values_at_roots`; points on the first axis."""
    size = values.shape[0]
    lead = values.shape[1:]
    omega = field.root_of_unity(size)
    flat = np.ascontiguousarray(values.reshape(size, -1).T)
    coeffs = kernels.ntt(flat, field.p, omega, inverse=True)
    return coeffs.reshape(lead + (size,))


# ---------------------------------------------------------------------------
# batched scalar linear algebra (leading axis = batch)


def _getrf_small(a: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    batch, m, k = a.shape
    a = a.copy()
    perm = np.broadcast_to(np.arange(m), (batch, m)).copy()
    odd = np.zeros(batch, dtype=bool)
    bidx = np.arange(batch)
    for c in range(k):
        nz = a[:, c:, c] != 0
        r = nz.argmax(axis=1) + c
        swap = r != c
        if swap.any():
            top = a[bidx, c].copy()
            a[bidx, c] = a[bidx, r]
            a[bidx, r] = top
            ptop = perm[bidx, c].copy()
            perm[bidx, c] = perm[bidx, r]
            perm[bidx, r] = ptop
            odd ^= swap
        if c + 1 == m:
            continue
        inv = kernels.inv_vec(a[:, c, c], p)
        low = kernels.mulmod(a[:, c + 1 :, c], inv[:, None], p)
        a[:, c + 1 :, c] = low
        if c + 1 < k:
            upd = kernels.mulmod(low[:, :, None], a[:, c, None, c + 1 :], p)
            a[:, c + 1 :, c + 1 :] = kernels.submod(a[:, c + 1 :, c + 1 :], upd, p)
    return a, perm, odd


def _getrf(a: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Batched LU with partial pivoting of ``(batch, m, k)``, ``m >= k``.

    Returns the packed factors, row permutations ``perm`` with
    ``a[perm] = L @ U`` per batch element, and the permutation parity.
    Singular inputs leave zeros on the diagonal of ``U``.
    """
    batch, m, k = a.shape
    if k <= _SMALL_BLOCK:
        return _getrf_small(a, p)
    k1 = k // 2
    lu1, perm1, odd1 = _getrf(a[:, :, :k1], p)
    right = np.take_along_axis(a[:, :, k1:], perm1[:, :, None], axis=1)
    l11_inv = _tril_unit_inv(lu1[:, :k1, :k1], p)
    u12 = kernels.matmul_mod(l11_inv, right[:, :k1], p)
    a22 = kernels.submod(right[:, k1:], kernels.matmul_mod(lu1[:, k1:, :k1], u12, p), p)
    lu2, perm2, odd2 = _getrf(a22, p)
    out = np.empty((batch, m, k), dtype=np.uint64)
    out[:, :k1, :k1] = lu1[:, :k1]
    out[:, k1:, :k1] = np.take_along_axis(lu1[:, k1:], perm2[:, :, None], axis=1)
    out[:, :k1, k1:] = u12
    out[:, k1:, k1:] = lu2
    perm = perm1.copy()
    perm[:, k1:] = np.take_along_axis(perm1[:, k1:], perm2, axis=1)
    return out, perm, odd1 ^ odd2


def _tril_unit_inv(l: np.ndarray, p: int) -> np.ndarray:
    """Inverse of the unit lower triangular matrix given by ``l``'s strict lower part."""
    batch, n, _ = l.shape
    if n <= _SMALL_BLOCK:
        x = np.zeros((batch, n, n), dtype=np.uint64)
        x[:, np.arange(n), np.arange(n)] = 1
        for i in range(1, n):
            row = kernels.matmul_mod(l[:, i : i + 1, :i], x[:, :i, :i], p)[:, 0]
            x[:, i, :i] = kernels.negmod(row, p)
        return x
    h = n // 2
    a_inv = _tril_unit_inv(l[:, :h, :h], p)
    d_inv = _tril_unit_inv(l[:, h:, h:], p)
    x = np.zeros((batch, n, n), dtype=np.uint64)
    x[:, :h, :h] = a_inv
    x[:, h:, h:] = d_inv
    x[:, h:, :h] = kernels.negmod(
        kernels.matmul_mod(d_inv, kernels.matmul_mod(l[:, h:, :h], a_inv, p), p), p
    )
    return x


def _diag_product(lu: np.ndarray, odd: np.ndarray, p: int) -> np.ndarray:
    batch, n, _ = lu.shape
    det = np.ones(batch, dtype=np.uint64)
    for i in range(n):
        det = kernels.mulmod(det, lu[:, i, i], p)
    return np.where(odd, kernels.negmod(det, p), det)


def _inverse_from_lu(lu: np.ndarray, perm: np.ndarray, p: int) -> np.ndarray:
    batch, n, _ = lu.shape
    l_inv = _tril_unit_inv(lu, p)
    diag = lu[:, np.arange(n), np.arange(n)]
    d_inv = kernels.inv_vec(diag, p)
    unit_upper = kernels.mulmod(np.triu(lu), d_inv[:, :, None], p)
    u1_inv = _tril_unit_inv(unit_upper.transpose(0, 2, 1), p).transpose(0, 2, 1)
    u_inv = kernels.mulmod(u1_inv, d_inv[:, None, :], p)
    x = kernels.matmul_mod(u_inv, l_inv, p)
    out = np.empty_like(x)
    np.put_along_axis(out, np.broadcast_to(perm[:, None, :], x.shape), x, axis=2)
    return out


def batched_det(mats: np.ndarray, p: int) -> np.ndarray:
    """Determinants of a stack ``(batch, n, n)``."""
    batch, n, _ = mats.shape
    if n == 0:
        return np.ones(batch, dtype=np.uint64)
    out = np.empty(batch, dtype=np.uint64)
    step = max(1, _BATCH_ELEMENTS // (n * n))
    for s in range(0, batch, step):
        lu, _, odd = _getrf(mats[s : s + step], p)
        out[s : s + step] = _diag_product(lu, odd, p)
    return out


def batched_adj(mats: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Determinants and adjoints of a stack ``(batch, n, n)``."""
    batch, n, _ = mats.shape
    dets = np.empty(batch, dtype=np.uint64)
    adjs = np.empty((batch, n, n), dtype=np.uint64)
    if n == 0:
        dets[:] = 1
        return dets, adjs
    if n == 1:
        dets[:] = mats[:, 0, 0]
        adjs[:] = 1
        return dets, adjs
    step = max(1, _BATCH_ELEMENTS // (n * n))
    for s in range(0, batch, step):
        chunk = mats[s : s + step]
        lu, perm, odd = _getrf(chunk, p)
        det = _diag_product(lu, odd, p)
        dets[s : s + step] = det
        adjs[s : s + step] = kernels.mulmod(_inverse_from_lu(lu, perm, p), det[:, None, None], p)
        for t in np.flatnonzero(det == 0):
            adjs[s + t] = _singular_adj(chunk[t], p)
    return dets, adjs


def scalar_rref(m: ScalarMatrix, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns."""
    a = np.array(m, dtype=np.uint64, copy=True)
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            a[[r, k]] = a[[k, r]]
        a[r] = kernels.mulmod(a[r], np.uint64(pow(int(a[r, c]), p - 2, p)), p)
        col = a[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            a[hit] = kernels.submod(a[hit], kernels.mulmod(col[hit, None], a[r][None, :], p), p)
        pivots.append(c)
        r += 1
    return a, pivots


def scalar_nullspace(m: ScalarMatrix, p: int) -> np.ndarray:
    """Basis of ``{x : m @ x = 0}`` as the columns of the returned array."""
    rows, cols = m.shape
    rref, pivots = scalar_rref(m, p)
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = np.zeros((cols, len(free)), dtype=np.uint64)
    for t, c in enumerate(free):
        basis[c, t] = 1
        for r, pc in enumerate(pivots):
            basis[pc, t] = (p - int(rref[r, c])) % p
    return basis


def _singular_adj(m: np.ndarray, p: int) -> np.ndarray:
    """Adjoint of a singular matrix via its kernels and one cofactor."""
    n = m.shape[0]
    right = scalar_nullspace(m, p)
    if right.shape[1] != 1:
        return np.zeros((n, n), dtype=np.uint64)
    left = scalar_nullspace(m.T, p)
    r = right[:, 0]
    l = left[:, 0]
    i = int(np.flatnonzero(r)[0])
    j = int(np.flatnonzero(l)[0])
    minor = np.delete(np.delete(m, j, axis=0), i, axis=1)
    cof = int(batched_det(minor[None], p)[0])
    if (i + j) % 2:
        cof = (p - cof) % p
    lam = cof * pow(int(r[i]) * int(l[j]) % p, p - 2, p) % p
    outer = kernels.mulmod(r[:, None], l[None, :], p)
    return kernels.mulmod(outer, np.uint64(lam), p)


def scalar_det(m: ScalarMatrix, p: int) -> FieldElement:
    m = np.asarray(m, dtype=np.uint64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"determinant needs a square matrix, got shape {m.shape}")
    return int(batched_det(m[None], p)[0])


def scalar_adj(m: ScalarMatrix, p: int) -> ScalarMatrix:
    """Adjoint ``adj(m)`` with ``m @ adj(m) = det(m) * I``, singular inputs included."""
    m = np.asarray(m, dtype=np.uint64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"adjoint needs a square matrix, got shape {m.shape}")
    return batched_adj(m[None], p)[1][0]


def scalar_inverse(m: ScalarMatrix, p: int) -> ScalarMatrix:
    m = np.asarray(m, dtype=np.uint64)
    det, adj = batched_adj(m[None], p)
    if det[0] == 0:
        raise ZeroDivisionError("matrix is singular")
    return kernels.mulmod(adj[0], np.uint64(pow(int(det[0]), p - 2, p)), p)


# ---------------------------------------------------------------------------
# polynomial determinant and adjoint


def _transform_size(count: int) -> int:
    return 1 << max(count - 1, 0).bit_length()


def _require_square(b: PolyMatrix) -> None:
    if b.rows != b.cols:
        raise ValueError(f"square matrix required, got {b.shape}")


def det_degree_bound(b: PolyMatrix) -> int | float:
    """Sum of column degrees; -inf when some column is zero."""
    degs = b.col_degree_bound
    if any(d == NEG_INF for d in degs):
        return NEG_INF
    return int(sum(degs))


def det_poly(b: PolyMatrix) -> Poly:
    """``det(b)`` by evaluation at roots of unity and inverse transform."""
    _require_square(b)
    field = b.field
    n = b.rows
    if n == 0:
        return Poly.constant(field, 1)
    bound = det_degree_bound(b)
    if bound == NEG_INF:
        return Poly.zero(field)
    size = _transform_size(int(bound) + 1)
    vals = _values_at_roots(b.coeffs, size, field)
    dets = batched_det(vals, field.p)
    return Poly(field, _from_values_at_roots(dets, field))


def adj_degree_bound(b: PolyMatrix) -> int:
    degs = [d if d != NEG_INF else 0 for d in b.col_degree_bound]
    return int(sum(degs) - min(degs)) if degs else 0


def adj_naive(b: PolyMatrix) -> PolyMatrix:
    """Full adjoint through ``adj(B)(x) = adj(B(x))`` at enough points."""
    _require_square(b)
    field = b.field
    n = b.rows
    if n <= 1:
        return PolyMatrix.identity(field, n)
    if b.is_zero():
        return PolyMatrix.zeros(field, n, n)
    size = _transform_size(adj_degree_bound(b) + 1)
    vals = _values_at_roots(b.coeffs, size, field)
    _, adjs = batched_adj(vals, field.p)
    return PolyMatrix(field, _from_values_at_roots(adjs, field))


def det_and_adj(b: PolyMatrix) -> tuple[Poly, PolyMatrix]:
    """Both ``det(b)`` and ``adj(b)`` from one set of point evaluations."""
    _require_square(b)
    field = b.field
    n = b.rows
    if n <= 1:
        return det_poly(b), PolyMatrix.identity(field, n)
    bound = det_degree_bound(b)
    size = _transform_size((int(bound) if bound != NEG_INF else adj_degree_bound(b)) + 1)
    vals = _values_at_roots(b.coeffs, size, field)
    dets, adjs = batched_adj(vals, field.p)
    det = Poly(field, _from_values_at_roots(dets, field)) if bound != NEG_INF else Poly.zero(field)
    return det, PolyMatrix(field, _from_values_at_roots(adjs, field))

