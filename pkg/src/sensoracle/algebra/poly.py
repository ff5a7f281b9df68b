"""Dense univariate polynomials over a prime field."""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from ..errors import DivisibilityError
from . import kernels
from .field import FieldConfig, FieldElement

NEG_INF = -math.inf
# Below this operand length schoolbook beats the transform.
NTT_CROSSOVER = 32
# Quotients shorter than this are computed by long division.
NEWTON_CROSSOVER = 48


def _trim(arr: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(arr)
    return arr[: nz[-1] + 1] if nz.size else arr[:0]


class Poly:
    """Immutable polynomial; ``coeffs[k]`` is the coefficient of ``X**k``.

    The zero polynomial has no stored coefficients and degree ``-inf``.
    """

    __slots__ = ("field", "coeffs", "_inverse_series")

    def __init__(self, field: FieldConfig, coeffs: Iterable[int] | np.ndarray = ()):
        if isinstance(coeffs, np.ndarray) and coeffs.dtype == np.uint64:
            arr = coeffs
            if arr.size and int(arr.max()) >= field.p:
                arr = arr % np.uint64(field.p)
        else:
            arr = kernels.as_residues(list(coeffs), field.p)
        arr = np.array(_trim(np.ravel(arr)), dtype=np.uint64)
        arr.flags.writeable = False
        self.field = field
        self.coeffs = arr
        self._inverse_series: np.ndarray | None = None

    # constructors ---------------------------------------------------------

    @classmethod
    def zero(cls, field: FieldConfig) -> Poly:
        return cls(field)

    @classmethod
    def constant(cls, field: FieldConfig, c: int) -> Poly:
        return cls(field, [c])

    @classmethod
    def monomial(cls, field: FieldConfig, c: int, k: int) -> Poly:
        arr = np.zeros(k + 1, dtype=np.uint64)
        arr[k] = int(c) % field.p
        return cls(field, arr)

    @classmethod
    def x(cls, field: FieldConfig) -> Poly:
        return cls.monomial(field, 1, 1)

    # basic properties -----------------------------------------------------

    @property
    def degree(self) -> int | float:
        return len(self.coeffs) - 1 if len(self.coeffs) else NEG_INF

    def is_zero(self) -> bool:
        return len(self.coeffs) == 0

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __len__(self) -> int:
        return len(self.coeffs)

    def leading(self) -> FieldElement:
        return int(self.coeffs[-1]) if len(self.coeffs) else 0

    def __getitem__(self, k: int) -> FieldElement:
        return int(self.coeffs[k]) if 0 <= k < len(self.coeffs) else 0

    def to_list(self) -> list[int]:
        return [int(c) for c in self.coeffs]

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = Poly.constant(self.field, other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.field.p == other.field.p and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self) -> int:
        return hash((self.field.p, self.coeffs.tobytes()))

    def __repr__(self) -> str:
        if self.is_zero():
            return "Poly(0)"
        terms = []
        for k, c in enumerate(self.to_list()):
            if c:
                terms.append(str(c) if k == 0 else f"{c}*X^{k}")
        return f"Poly({' + '.join(terms)})"

    # arithmetic -----------------------------------------------------------

    def _coerce(self, other) -> Poly:
        if isinstance(other, Poly):
            if other.field.p != self.field.p:
                raise ValueError("polynomials over different fields")
            return other
        return Poly.constant(self.field, int(other))

    def __add__(self, other) -> Poly:
        other = self._coerce(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = a.copy()
        if len(b):
            out[: len(b)] = kernels.addmod(a[: len(b)], b, self.field.p)
        return Poly(self.field, out)

    __radd__ = __add__

    def __neg__(self) -> Poly:
        return Poly(self.field, kernels.negmod(self.coeffs, self.field.p))

    def __sub__(self, other) -> Poly:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> Poly:
        return self._coerce(other) - self

    def __mul__(self, other) -> Poly:
        if isinstance(other, Poly):
            return poly_mul(self, other)
        c = int(other) % self.field.p
        if c == 0 or self.is_zero():
            return Poly.zero(self.field)
        return Poly(self.field, kernels.mulmod(self.coeffs, np.uint64(c), self.field.p))

    __rmul__ = __mul__

    def shift(self, k: int) -> Poly:
        """Multiply by ``X**k``."""
        if self.is_zero() or k == 0:
            return self
        return Poly(self.field, np.concatenate([np.zeros(k, dtype=np.uint64), self.coeffs]))

    def __call__(self, x: int) -> FieldElement:
        return poly_eval(self, x)

    def __floordiv__(self, other: Poly) -> Poly:
        return poly_exact_div(self, other)

    def reversed_inverse(self, length: int) -> np.ndarray:
        """Series ``1/rev(self) mod X**length`` (cached), used for division."""
        cached = self._inverse_series
        if cached is not None and len(cached) >= length:
            return cached[:length]
        g = _newton_inverse(self.coeffs[::-1].copy(), length, self.field)
        self._inverse_series = g
        return g


# ---------------------------------------------------------------------------
# multiplication


def _schoolbook(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    if len(a) > len(b):
        a, b = b, a
    out = np.zeros(len(a) + len(b) - 1, dtype=np.uint64)
    rows = kernels.mulmod(a[:, None], b[None, :], p)
    for i in range(len(a)):
        seg = out[i : i + len(b)]
        seg += rows[i]
        seg -= np.uint64(p) * (seg >= np.uint64(p))
    kernels.tally(rows.size)
    return out


def _ntt_mul(a: np.ndarray, b: np.ndarray, field: FieldConfig) -> np.ndarray:
    n_out = len(a) + len(b) - 1
    size = 1 << (n_out - 1).bit_length()
    omega = field.root_of_unity(size)
    p = field.p
    fa = np.zeros(size, dtype=np.uint64)
    fa[: len(a)] = a
    fb = np.zeros(size, dtype=np.uint64)
    fb[: len(b)] = b
    both = kernels.ntt(np.stack([fa, fb]), p, omega)
    prod = kernels.mulmod(both[0], both[1], p)
    return kernels.ntt(prod, p, omega, inverse=True)[:n_out]


def mul_coeffs(a: np.ndarray, b: np.ndarray, field: FieldConfig) -> np.ndarray:
    """Product of two coefficient arrays (no trimming)."""
    if len(a) == 0 or len(b) == 0:
        return np.zeros(0, dtype=np.uint64)
    if min(len(a), len(b)) < NTT_CROSSOVER:
        return _schoolbook(a, b, field.p)
    return _ntt_mul(a, b, field)


def poly_mul(a: Poly, b: Poly) -> Poly:
    """Exact product; schoolbook for short operands, NTT otherwise.

    Raises :class:`~sensoracle.errors.CapacityError` (a configuration error)
    when the product length exceeds the field's transform capacity.
    """
    if a.field.p != b.field.p:
        raise ValueError("polynomials over different fields")
    return Poly(a.field, mul_coeffs(a.coeffs, b.coeffs, a.field))


# ---------------------------------------------------------------------------
# division


def _newton_inverse(h: np.ndarray, length: int, field: FieldConfig) -> np.ndarray:
    p = field.p
    if len(h) == 0 or h[0] == 0:
        raise ZeroDivisionError("power series with zero constant term")
    g = np.array([pow(int(h[0]), p - 2, p)], dtype=np.uint64)
    k = 1
    while k < length:
        k = min(2 * k, length)
        hg = mul_coeffs(h[:k], g, field)[:k]
        # g <- g * (2 - h g)
        corr = kernels.negmod(hg, p)
        corr[0] = (int(corr[0]) + 2) % p
        g = mul_coeffs(g, corr, field)[:k]
    return g[:length]


def poly_divmod(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    """Quotient and remainder of ``a`` by non-zero ``b``."""
    if b.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    field, p = a.field, a.field.p
    la, lb = len(a), len(b)
    if la < lb:
        return Poly.zero(field), a
    qlen = la - lb + 1
    if lb == 1:
        inv = pow(b.leading(), p - 2, p)
        return a * inv, Poly.zero(field)
    if qlen <= NEWTON_CROSSOVER:
        r = a.coeffs.copy()
        q = np.zeros(qlen, dtype=np.uint64)
        lc_inv = pow(b.leading(), p - 2, p)
        bc = b.coeffs
        for i in range(qlen - 1, -1, -1):
            c = int(r[i + lb - 1]) * lc_inv % p
            q[i] = c
            if c:
                r[i : i + lb] = kernels.submod(r[i : i + lb], kernels.mulmod(bc, np.uint64(c), p), p)
        return Poly(field, q), Poly(field, r[: lb - 1])
    # reversed-series division: rev(q) = rev(a) / rev(b) mod X**qlen
    inv = b.reversed_inverse(qlen)
    q_rev = mul_coeffs(a.coeffs[::-1][:qlen].copy(), inv, field)[:qlen]
    q = Poly(field, q_rev[::-1].copy())
    r = a - poly_mul(q, b)
    return q, r


def poly_exact_div(a: Poly, b: Poly) -> Poly:
    """Quotient ``a / b``; raises :class:`DivisibilityError` on a remainder."""
    if a.is_zero():
        if b.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        return a
    q, r = poly_divmod(a, b)
    if not r.is_zero():
        raise DivisibilityError(
            f"non-exact division: deg(a)={a.degree}, deg(b)={b.degree}, deg(rem)={r.degree}"
        )
    return q


def poly_monic(a: Poly) -> Poly:
    if a.is_zero():
        return a
    return a * pow(a.leading(), a.field.p - 2, a.field.p)


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic greatest common divisor (zero for two zero inputs)."""
    while not b.is_zero():
        a, b = b, poly_divmod(a, b)[1]
    return poly_monic(a)


# ---------------------------------------------------------------------------
# evaluation and interpolation


def poly_eval(a: Poly, x: int) -> FieldElement:
    p = a.field.p
    x %= p
    acc = 0
    for c in reversed(a.to_list()):
        acc = (acc * x + c) % p
    kernels.tally(2 * len(a))
    return acc


def eval_coeffs_many(coeffs: np.ndarray, xs: np.ndarray, p: int) -> np.ndarray:
    """Horner evaluation of coefficient rows ``coeffs[..., k]`` at every x.

    Returns shape ``coeffs.shape[:-1] + (len(xs),)``.
    """
    xs = np.asarray(xs, dtype=np.uint64)
    lead = coeffs.shape[:-1]
    acc = np.zeros(lead + (len(xs),), dtype=np.uint64)
    for k in range(coeffs.shape[-1] - 1, -1, -1):
        acc = kernels.mulmod(acc, xs, p)
        acc = kernels.addmod(acc, coeffs[..., k : k + 1], p)
    return acc


def poly_eval_many(a: Poly, points: Sequence[int]) -> list[FieldElement]:
    p = a.field.p
    xs = kernels.as_residues(list(points), p)
    if len(xs) == 0:
        return []
    if a.is_zero():
        return [0] * len(xs)
    return [int(v) for v in eval_coeffs_many(a.coeffs, xs, p)]


def lagrange_basis(xs: Sequence[int], field: FieldConfig) -> np.ndarray:
    """Matrix whose row k holds the coefficients of the k-th Lagrange polynomial."""
    p = field.p
    xs_arr = kernels.as_residues(list(xs), p)
    n = len(xs_arr)
    if len(set(int(x) for x in xs_arr)) != n:
        raise ValueError("interpolation points must have distinct x-coordinates")
    # prod_k (X - x_k), highest coefficient last
    full = np.zeros(n + 1, dtype=np.uint64)
    full[0] = 1
    for k in range(n):
        shifted = np.concatenate([np.zeros(1, dtype=np.uint64), full[:-1]])
        full = kernels.submod(shifted, kernels.mulmod(full, xs_arr[k], p), p)
    # synthetic division of the full product by (X - x_k), all k at once
    quot = np.zeros((n, n), dtype=np.uint64)
    carry = np.zeros(n, dtype=np.uint64)
    for i in range(n, 0, -1):
        carry = kernels.addmod(kernels.mulmod(carry, xs_arr, p), np.uint64(full[i]), p)
        quot[:, i - 1] = carry
    # row k evaluated at x_k gives prod_{l != k} (x_k - x_l)
    denom = np.zeros(n, dtype=np.uint64)
    for i in range(n - 1, -1, -1):
        denom = kernels.addmod(kernels.mulmod(denom, xs_arr, p), quot[:, i], p)
    weights = kernels.inv_vec(denom, p)
    return kernels.mulmod(quot, weights[:, None], p)


def poly_interpolate(points: Sequence[tuple[int, int]], field: FieldConfig) -> Poly:
    """Unique polynomial of degree < len(points) through ``points``."""
    if not points:
        return Poly.zero(field)
    if len(points) > field.p:
        raise ValueError("more points than field elements")
    xs = [x for x, _ in points]
    ys = kernels.as_residues([y for _, y in points], field.p)
    basis = lagrange_basis(xs, field)
    return Poly(field, kernels.matmul_mod(ys[None, :], basis, field.p)[0])


def min_nonzero_degree(a: Poly) -> int | None:
    nz = np.flatnonzero(a.coeffs)
    return int(nz[0]) if nz.size else None
