"""Adjoint and determinant of a matrix after a batch of entry changes.

A batch setting ``f`` entries of ``A`` is the rank-``f`` patch ``A + U V^T``
with ``U[:, c] = delta_c e_{i_c}`` and ``V[:, c] = e_{j_c}``.  With the
``f x f`` matrix ``M = I det(A) + V^T adj(A) U``::

    adj(A + U V^T) det(A)^f = adj(A) det(M) - (adj(A) U) adj(M) (V^T adj(A))
    det(A + U V^T) det(A)^(f-1) = det(M)

so one entry of the new adjoint needs ``2f + 1`` entries of ``adj(A)``, a
row-vector product with ``adj(M)`` and ``f`` exact divisions by ``det(A)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from .algebra.field import FieldConfig
from .algebra.poly import Poly, poly_exact_div
from .errors import SingularMatrixError, SingularUpdateError
from .kbd import KbdOracle, build_kbd, query_entry, query_row
from .pmat import PolyMatrix, adj_naive, det_poly, pm_mul, scalar_adj, scalar_det

Mode = Literal["naive", "oracle"]
Change = tuple[int, int, "Poly | int"]


@dataclass(frozen=True)
class BaseState:
    """Preprocessed matrix with access to entries of its adjoint.

    ``naive`` mode stores ``adj(A)`` explicitly (as a scalar array when
    ``A`` has degree 0); ``oracle`` mode keeps a kernel basis decomposition.
    """

    a: PolyMatrix
    det: Poly
    mode: Mode
    mu: float = 0.0
    degree_bound: int = 0
    adjoint: PolyMatrix | None = field(default=None, repr=False)
    oracle: KbdOracle | None = field(default=None, repr=False)
    scalar_adjoint: np.ndarray | None = field(default=None, repr=False)

    @property
    def field(self) -> FieldConfig:
        return self.a.field

    @property
    def n(self) -> int:
        return self.a.rows

    @property
    def d(self) -> int:
        """Largest degree allowed for updated entries."""
        return self.degree_bound

    @property
    def scalar(self) -> bool:
        return self.scalar_adjoint is not None

    def adj_entry(self, i: int, j: int) -> Poly:
        """``adj(A)[i, j]``."""
        if self.scalar_adjoint is not None:
            return Poly.constant(self.field, int(self.scalar_adjoint[i, j]))
        if self.adjoint is not None:
            return self.adjoint.entry(i, j)
        assert self.oracle is not None
        return query_entry(self.oracle, i, j)

    def adj_value(self, i: int, j: int) -> int:
        """``adj(A)[i, j]`` as a field element (scalar state only)."""
        assert self.scalar_adjoint is not None
        return int(self.scalar_adjoint[i, j])


@dataclass(frozen=True)
class UpdatePatch:
    """One batch of entry changes relative to a :class:`BaseState`."""

    rows: tuple[int, ...]
    cols: tuple[int, ...]
    entries: tuple[Poly, ...]
    deltas: tuple[Poly, ...]
    m: PolyMatrix
    det_m: Poly
    adj_m: KbdOracle | None = field(default=None, repr=False)
    scalar_adj_m: np.ndarray | None = field(default=None, repr=False)

    @property
    def f(self) -> int:
        return len(self.rows)

    def u(self, n: int) -> PolyMatrix:
        """``U`` as a dense ``n x f`` matrix."""
        return _sparse_columns(self.m.field, n, self.rows, self.deltas)

    def v(self, n: int) -> PolyMatrix:
        """``V`` as a dense ``n x f`` matrix."""
        one = Poly.constant(self.m.field, 1)
        return _sparse_columns(self.m.field, n, self.cols, [one] * self.f)


def _sparse_columns(fld: FieldConfig, n: int, rows: Sequence[int], values: Sequence[Poly]) -> PolyMatrix:
    length = max([1] + [len(v) for v in values])
    out = np.zeros((n, len(rows), length), dtype=np.uint64)
    for c, (r, val) in enumerate(zip(rows, values)):
        out[r, c, : len(val)] = val.coeffs
    return PolyMatrix(fld, out)


def preprocess(
    a: PolyMatrix, mu: float = 0.0, mode: Mode = "oracle", *, degree: int | None = None
) -> BaseState:
    """Compute ``det(A)`` and set up adjoint access.

    ``degree`` bounds the degree of future entry updates (default: the
    degree of ``A``).  Raises :class:`SingularMatrixError` when ``A`` is
    singular.
    """
    if a.rows != a.cols:
        raise ValueError(f"square matrix required, got {a.shape}")
    if mode not in ("naive", "oracle"):
        raise ValueError(f"unknown mode {mode!r}")
    if not 0.0 <= mu <= 1.0:
        raise ValueError(f"mu must lie in [0, 1], got {mu}")
    p = a.field.p
    d = max(a.length - 1, 0) if degree is None else max(degree, a.length - 1)
    if mode == "naive" and a.is_scalar() and d == 0:
        mat = a.padded(1)[:, :, 0]
        det = scalar_det(mat, p)
        if det == 0:
            raise SingularMatrixError("matrix is singular")
        return BaseState(a, Poly.constant(a.field, det), mode, mu, d, scalar_adjoint=scalar_adj(mat, p))
    det = det_poly(a)
    if det.is_zero():
        raise SingularMatrixError("matrix is singular")
    if mode == "naive":
        return BaseState(a, det, mode, mu, d, adjoint=adj_naive(a))
    return BaseState(a, det, mode, mu, d, oracle=build_kbd(a, mu))


def _validate_changes(base: BaseState, changes: Sequence[Change]) -> list[tuple[int, int, Poly]]:
    seen: set[tuple[int, int]] = set()
    out = []
    n = base.n
    for i, j, value in changes:
        if not (0 <= i < n and 0 <= j < n):
            raise IndexError(f"position ({i}, {j}) outside {n}x{n}")
        if (i, j) in seen:
            raise ValueError(f"position ({i}, {j}) changed twice in one batch")
        seen.add((i, j))
        poly = value if isinstance(value, Poly) else Poly.constant(base.field, int(value))
        if poly.degree > base.d:
            raise ValueError(f"new entry at ({i}, {j}) has degree {poly.degree} > {base.d}")
        out.append((i, j, poly))
    return out


def apply_batch(base: BaseState, changes: Sequence[Change]) -> UpdatePatch:
    """Set ``A[i, j] := value`` for every change (0-based positions).

    Raises :class:`SingularUpdateError` when the updated matrix is singular.
    """
    fld = base.field
    items = _validate_changes(base, changes)
    rows = tuple(i for i, _, _ in items)
    cols = tuple(j for _, j, _ in items)
    entries = tuple(e for _, _, e in items)
    deltas = tuple(e - base.a.entry(i, j) for i, j, e in items)
    f = len(items)
    if base.scalar:
        p = fld.p
        detv = int(base.det[0])
        m = np.zeros((f, f), dtype=np.uint64)
        for c in range(f):
            for c2 in range(f):
                val = base.adj_value(cols[c], rows[c2]) * int(deltas[c2][0])
                if c == c2:
                    val += detv
                m[c, c2] = val % p
        det_m = scalar_det(m, p)
        if det_m == 0:
            raise SingularUpdateError("matrix is singular after the update")
        return UpdatePatch(
            rows, cols, entries, deltas, PolyMatrix.from_scalar(fld, m),
            Poly.constant(fld, det_m), scalar_adj_m=scalar_adj(m, p),
        )
    grid = [
        [
            base.adj_entry(cols[c], rows[c2]) * deltas[c2] + (base.det if c == c2 else 0)
            for c2 in range(f)
        ]
        for c in range(f)
    ]
    m_poly = PolyMatrix.from_polys(fld, grid) if f else PolyMatrix.zeros(fld, 0, 0)
    det_m = det_poly(m_poly)
    if det_m.is_zero():
        raise SingularUpdateError("matrix is singular after the update")
    adj_m = build_kbd(m_poly) if f else None
    return UpdatePatch(rows, cols, entries, deltas, m_poly, det_m, adj_m=adj_m)


def _check_index(base: BaseState, i: int, j: int) -> None:
    if not (0 <= i < base.n and 0 <= j < base.n):
        raise IndexError(f"entry ({i}, {j}) outside {base.n}x{base.n}")


def query_adj_value(base: BaseState, patch: UpdatePatch | None, i: int, j: int) -> int:
    """Scalar-mode ``adj(A + U V^T)[i, j]`` as a field element."""
    _check_index(base, i, j)
    if patch is None or patch.f == 0:
        return base.adj_value(i, j)
    assert patch.scalar_adj_m is not None
    p = base.field.p
    f = patch.f
    u = np.array(
        [base.adj_value(i, patch.rows[c]) * int(patch.deltas[c][0]) % p for c in range(f)],
        dtype=object,
    )
    v = np.array([base.adj_value(patch.cols[c], j) for c in range(f)], dtype=object)
    w = u.dot(patch.scalar_adj_m.astype(object)) % p
    value = (base.adj_value(i, j) * int(patch.det_m[0]) - int(w.dot(v))) % p
    return value * pow(int(base.det[0]), -f, p) % p


def query_adj_entry(base: BaseState, patch: UpdatePatch | None, i: int, j: int) -> Poly:
    """``adj(A + U V^T)[i, j]`` for the batch in ``patch`` (0-based)."""
    if base.scalar:
        return Poly.constant(base.field, query_adj_value(base, patch, i, j))
    _check_index(base, i, j)
    if patch is None or patch.f == 0:
        return base.adj_entry(i, j)
    assert patch.adj_m is not None
    f = patch.f
    u = [base.adj_entry(i, patch.rows[c]) * patch.deltas[c] for c in range(f)]
    w = query_row(patch.adj_m, u)
    value = base.adj_entry(i, j) * patch.det_m
    for c in range(f):
        value = value - w[c] * base.adj_entry(patch.cols[c], j)
    for _ in range(f):
        value = poly_exact_div(value, base.det)
    return value


def current_det(base: BaseState, patch: UpdatePatch | None) -> Poly:
    """``det(A + U V^T)``."""
    if patch is None or patch.f == 0:
        return base.det
    value = patch.det_m
    for _ in range(patch.f - 1):
        value = poly_exact_div(value, base.det)
    return value


def smw_identity_check(a: PolyMatrix, u: PolyMatrix, v: PolyMatrix) -> bool:
    """Check both sides of the adjoint update identity exactly.

    ``u`` and ``v`` are dense ``n x f`` matrices; ``A`` and ``A + U V^T``
    are expected to be non-singular.
    """
    fld = a.field
    n, f = u.shape
    if v.shape != (n, f) or a.shape != (n, n):
        raise ValueError("shape mismatch between A, U and V")
    det_a = det_poly(a)
    adj_a = adj_naive(a)
    if f == 0:
        return True
    updated = a + pm_mul(u, v.T)
    m = PolyMatrix.identity(fld, f).scale(det_a) + pm_mul(pm_mul(v.T, adj_a), u)
    lhs = adj_naive(updated).scale(_power(det_a, f))
    rhs = adj_a.scale(det_poly(m)) - pm_mul(pm_mul(pm_mul(adj_a, u), adj_naive(m)), pm_mul(v.T, adj_a))
    det_ok = det_poly(m) == det_poly(updated) * _power(det_a, f - 1)
    return lhs == rhs and det_ok


def _power(a: Poly, e: int) -> Poly:
    out = Poly.constant(a.field, 1)
    for _ in range(e):
        out = out * a
    return out
