"""Vectorised arithmetic modulo a prime p < 2**62 on numpy uint64 arrays.

Elementwise products use the floating-point quotient trick: the quotient
floor(a*b/p) is estimated in 80-bit extended precision, the remainder is
then formed exactly with wrapping uint64 arithmetic and corrected by at most
one multiple of p.  Matrix products split both operands into 21-bit limbs so
that float64 BLAS sums stay exact (< 2**53) and recombine the nine partial
products modulo p.

Every routine reports the number of field operations it performs to the
active :class:`OpCounter`, if any (see :func:`counting`).
"""

from __future__ import annotations

import contextlib
import contextvars
from functools import lru_cache
from typing import Iterator

import numpy as np

if np.finfo(np.longdouble).nmant < 63:  # pragma: no cover - platform guard
    raise ImportError("sensoracle needs 80-bit long double for modular products")

MAX_MODULUS = 1 << 62
_LIMB_BITS = 21
_LIMB_MASK = np.uint64((1 << _LIMB_BITS) - 1)
# K * (2**21 - 1)**2 < 2**53 keeps every float64 dot product exact.
_MAX_INNER = 2048


class OpCounter:
    """Accumulates field operation counts (multiplications plus additions)."""

    __slots__ = ("ops",)

    def __init__(self) -> None:
        self.ops = 0

    def __repr__(self) -> str:
        return f"OpCounter(ops={self.ops})"


_ACTIVE: contextvars.ContextVar[OpCounter | None] = contextvars.ContextVar(
    "sensoracle_op_counter", default=None
)


@contextlib.contextmanager
def counting(counter: OpCounter | None = None) -> Iterator[OpCounter]:
    """Count field operations performed inside the ``with`` block."""
    counter = counter if counter is not None else OpCounter()
    token = _ACTIVE.set(counter)
    try:
        yield counter
    finally:
        _ACTIVE.reset(token)


@contextlib.contextmanager
def paused() -> Iterator[None]:
    """Suspend counting, e.g. for self-checks that are not part of a phase."""
    token = _ACTIVE.set(None)
    try:
        yield
    finally:
        _ACTIVE.reset(token)


def tally(n: int) -> None:
    counter = _ACTIVE.get()
    if counter is not None:
        counter.ops += int(n)


def as_residues(values, p: int) -> np.ndarray:
    """Convert integers (any sign, any size) to canonical uint64 residues."""
    arr = np.asarray(values, dtype=object)
    return np.asarray(arr % p, dtype=np.uint64) if arr.size else arr.astype(np.uint64)


def mulmod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Elementwise ``a * b mod p`` with numpy broadcasting; inputs canonical."""
    a = np.asarray(a, dtype=np.uint64)
    b = np.asarray(b, dtype=np.uint64)
    if a.ndim == 0 or b.ndim == 0:
        shape = np.broadcast_shapes(a.shape, b.shape)
        if not shape:
            return np.asarray(int(a) * int(b) % p, dtype=np.uint64)
        a = np.broadcast_to(a, shape) if a.ndim == 0 else a
        b = np.broadcast_to(b, shape) if b.ndim == 0 else b
    q = a.astype(np.longdouble) * b.astype(np.longdouble)
    q /= np.longdouble(p)
    qi = q.astype(np.uint64)
    r = a * b
    r -= qi * np.uint64(p)
    ri = r.view(np.int64)
    pi = np.int64(p)
    ri += (ri >> 63) & pi
    ri -= ((pi - 1 - ri) >> 63) & pi
    tally(ri.size)
    return r


def addmod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    s = np.add(a, b, dtype=np.uint64)
    s = np.atleast_1d(s)
    s -= np.uint64(p) * (s >= np.uint64(p))
    tally(s.size)
    return s


def submod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    a = np.atleast_1d(np.asarray(a, dtype=np.uint64))
    b = np.asarray(b, dtype=np.uint64)
    s = np.add(a, np.uint64(p) - b, dtype=np.uint64)
    s -= np.uint64(p) * (s >= np.uint64(p))
    tally(s.size)
    return s


def negmod(a: np.ndarray, p: int) -> np.ndarray:
    a = np.asarray(a, dtype=np.uint64)
    return np.where(a == 0, a, np.uint64(p) - a)


def summod(a: np.ndarray, p: int, axis: int = -1) -> np.ndarray:
    """Sum along ``axis`` modulo p without overflow."""
    a = np.asarray(a, dtype=np.uint64)
    half = np.uint64(31)
    lo = (a & np.uint64((1 << 31) - 1)).sum(axis=axis, dtype=np.uint64) % np.uint64(p)
    hi = (a >> half).sum(axis=axis, dtype=np.uint64) % np.uint64(p)
    hi = mulmod(np.atleast_1d(hi), np.uint64((1 << 31) % p), p).reshape(np.shape(lo))
    tally(a.size)
    return (lo + hi) % np.uint64(p)


def _limbs(a: np.ndarray) -> list[np.ndarray]:
    return [
        ((a >> np.uint64(_LIMB_BITS * k)) & _LIMB_MASK).astype(np.float64)
        for k in range(3)
    ]


def _mul_small(x: np.ndarray, w: int, p: int) -> np.ndarray:
    """``x * w mod p`` for ``x < 2**63`` and ``w <= 2**21``.

    The quotient is below 2**23, so a float64 estimate is off by at most one.
    """
    q = (x.astype(np.float64) * (w / p)).astype(np.uint64)
    r = x * np.uint64(w)
    r -= q * np.uint64(p)
    ri = r.view(np.int64)
    pi = np.int64(p)
    ri += (ri >> 63) & pi
    ri -= ((pi - 1 - ri) >> 63) & pi
    return r


def matmul_mod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """``a @ b mod p`` with np.matmul broadcasting semantics."""
    a = np.asarray(a, dtype=np.uint64)
    b = np.asarray(b, dtype=np.uint64)
    k = a.shape[-1]
    if k != b.shape[-2]:
        raise ValueError(f"inner dimensions differ: {a.shape} @ {b.shape}")
    out_shape = np.broadcast_shapes(a.shape[:-2], b.shape[:-2]) + (a.shape[-2], b.shape[-1])
    if k == 0 or 0 in out_shape:
        return np.zeros(out_shape, dtype=np.uint64)
    P = np.uint64(p)
    out = None
    for start in range(0, k, _MAX_INNER):
        al = _limbs(a[..., start:start + _MAX_INNER])
        bl = _limbs(b[..., start:start + _MAX_INNER, :])
        # groups[s] collects limb products of weight 2**(21*s); each product
        # is an exact integer below 2**53, so three of them fit in uint64
        groups: list[np.ndarray | None] = [None] * 5
        for u in range(3):
            for v in range(3):
                c = np.matmul(al[u], bl[v]).astype(np.uint64)
                g = groups[u + v]
                groups[u + v] = c if g is None else g + c
        acc = groups[4] % P
        for s in range(3, -1, -1):
            acc = _mul_small(acc, 1 << _LIMB_BITS, p) + groups[s]
        acc %= P
        out = acc if out is None else (out + acc) % P
    tally(2 * int(np.prod(out_shape)) * k)
    return out


def inv_vec(a: np.ndarray, p: int) -> np.ndarray:
    """Elementwise inverse by Fermat exponentiation; zeros map to zero."""
    a = np.atleast_1d(np.asarray(a, dtype=np.uint64))
    if a.size <= 4096:
        # Python's modular inverse beats ~120 vectorised passes on short inputs
        tally(a.size)
        return np.array([pow(int(x), -1, p) if x else 0 for x in a.ravel().tolist()],
                        dtype=np.uint64).reshape(a.shape)
    result = np.ones_like(a)
    base = a.copy()
    e = p - 2
    while e:
        if e & 1:
            result = mulmod(result, base, p)
        e >>= 1
        if e:
            base = mulmod(base, base, p)
    return result


def powers(x: int, count: int, p: int) -> np.ndarray:
    """[1, x, x**2, ..., x**(count-1)] mod p."""
    out = np.empty(count, dtype=np.uint64)
    acc = 1
    for i in range(count):
        out[i] = acc
        acc = acc * x % p
    tally(count)
    return out


# ---------------------------------------------------------------------------
# Number-theoretic transform along the last axis


@lru_cache(maxsize=128)
def _ntt_plan(p: int, omega: int, size: int):
    log = size.bit_length() - 1
    rev = np.zeros(size, dtype=np.int64)
    for i in range(size):
        rev[i] = int(format(i, f"0{log}b")[::-1], 2) if log else 0
    stages = []
    h = 1
    while h < size:
        w = pow(omega, size // (2 * h), p)
        stages.append(powers(w, h, p))
        h *= 2
    return rev, stages


def ntt(a: np.ndarray, p: int, omega: int, inverse: bool = False) -> np.ndarray:
    """Radix-2 transform of ``a`` along its last axis.

    ``omega`` must be a primitive root of unity of order ``a.shape[-1]``.
    The inverse transform includes the 1/N scaling.
    """
    a = np.asarray(a, dtype=np.uint64)
    size = a.shape[-1]
    if size & (size - 1):
        raise ValueError("transform length must be a power of two")
    if inverse:
        omega = pow(omega, p - 2, p)
    rev, stages = _ntt_plan(p, omega, size)
    x = a[..., rev].copy()
    lead = x.shape[:-1]
    P = np.uint64(p)
    h = 1
    for w in stages:
        x = x.reshape(lead + (size // (2 * h), 2, h))
        u = x[..., 0, :]
        v = mulmod(x[..., 1, :], w, p)
        top = u + v
        top -= P * (top >= P)
        bot = u + (P - v)
        bot -= P * (bot >= P)
        x = np.stack((top, bot), axis=-2)
        tally(2 * v.size)
        h *= 2
    x = x.reshape(lead + (size,))
    if inverse and size > 1:
        x = mulmod(x, np.uint64(pow(size, p - 2, p)), p)
    return x
