"""Prime fields Z_p with NTT-friendly moduli.

Field elements are plain Python ints kept in canonical form ``0 <= x < p``;
:class:`FieldConfig` carries the modulus and the root of unity used by the
number-theoretic transform.
"""

from __future__ import annotations

from dataclasses import dataclass

import sympy

from ..errors import CapacityError, ConfigurationError
from . import kernels

FieldElement = int

# (p, two_adicity, primitive 2**two_adicity-th root of unity), ascending p.
# All are 62-bit primes of the form c * 2**k + 1.
BUILTIN_PRIMES: tuple[tuple[int, int, int], ...] = (
    (2305846788784914433, 36, 1584005811744460918),
    (2305919975027638273, 41, 691024134734949470),
    (2306071707632271361, 44, 2023098326499385887),
    (2308094809027379201, 51, 295020992362985096),
    (2391411402133733377, 52, 255595967784038756),
    (4179340454199820289, 57, 68630377364883),
)


@dataclass(frozen=True)
class FieldConfig:
    p: int
    two_adicity: int
    root: int

    def __post_init__(self) -> None:
        p, s, w = self.p, self.two_adicity, self.root
        if not 2 < p < kernels.MAX_MODULUS:
            raise ConfigurationError(f"modulus must lie in (2, 2**62), got {p}")
        if (p - 1) % (1 << s):
            raise ConfigurationError(f"2**{s} does not divide p - 1")
        if pow(w, 1 << s, p) != 1 or (s > 0 and pow(w, 1 << (s - 1), p) == 1):
            raise ConfigurationError(f"{w} is not a primitive 2**{s}-th root of unity mod {p}")

    @classmethod
    def from_prime(cls, p: int) -> FieldConfig:
        """Validate ``p`` and derive its two-adicity and root of unity."""
        p = int(p)
        if not 2 < p < kernels.MAX_MODULUS:
            raise ConfigurationError(f"modulus must lie in (2, 2**62), got {p}")
        for q, s, w in BUILTIN_PRIMES:
            if q == p:
                return cls(q, s, w)
        if not sympy.isprime(p):
            raise ConfigurationError(f"{p} is not prime")
        s = ((p - 1) & -(p - 1)).bit_length() - 1
        g = sympy.primitive_root(p)
        return cls(p, s, pow(g, (p - 1) >> s, p))

    @property
    def max_transform(self) -> int:
        return 1 << self.two_adicity

    def root_of_unity(self, size: int) -> int:
        """Primitive ``size``-th root of unity; ``size`` a power of two."""
        if size & (size - 1) or size < 1:
            raise ValueError("size must be a power of two")
        if size > self.max_transform:
            need = size.bit_length() - 1
            raise CapacityError(
                f"transform of length {size} needs two-adicity {need}, "
                f"field p={self.p} has {self.two_adicity}"
            )
        return pow(self.root, self.max_transform // size, self.p)

    # scalar arithmetic -------------------------------------------------

    def __call__(self, value: int) -> FieldElement:
        return int(value) % self.p

    def add(self, a: int, b: int) -> FieldElement:
        kernels.tally(1)
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> FieldElement:
        kernels.tally(1)
        return (a - b) % self.p

    def neg(self, a: int) -> FieldElement:
        return -a % self.p

    def mul(self, a: int, b: int) -> FieldElement:
        kernels.tally(1)
        return a * b % self.p

    def inv(self, a: int) -> FieldElement:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("inverse of zero in Z_p")
        kernels.tally(1)
        return pow(a, -1, self.p)

    def pow(self, a: int, e: int) -> FieldElement:
        if e < 0:
            return pow(self.inv(a), -e, self.p)
        kernels.tally(max(1, int(e).bit_length()))
        return pow(a, e, self.p)


def select_field(n: int, degree_bound: int) -> FieldConfig:
    """Smallest built-in prime with ``p >= n**3`` and enough two-adicity.

    Transforms must cover polynomial lengths up to ``2 * degree_bound * n + 2``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    need_len = 2 * max(degree_bound, 0) * n + 2
    for p, s, w in BUILTIN_PRIMES:
        if p >= n ** 3 and (1 << s) >= need_len:
            return FieldConfig(p, s, w)
    raise CapacityError(
        f"no built-in prime serves n={n}, degree bound {degree_bound} "
        f"(needs p >= {n ** 3} and transform length {need_len})"
    )
