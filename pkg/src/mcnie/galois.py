"""Arithmetic in GF(2^m) and GF(2)-subspaces of it.

Field elements are plain ints: bit i is the coefficient of x^i.  ``FieldElement``
wraps one with operators for interactive use; the hot paths stay on ints.

Subspaces are kept as a reduced echelon basis where each basis vector's pivot is
its highest set bit, no other basis vector has that bit, and the basis is sorted
by decreasing pivot.  That form is unique per subspace, so equality of
subspaces is equality of bases.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import ParameterError


# -- GF(2)[x] helpers on int-encoded polynomials ------------------------------

def _pmod(a: int, p: int) -> int:
    dp = p.bit_length()
    while a.bit_length() >= dp:
        a ^= p << (a.bit_length() - dp)
    return a


def _pmulmod(a: int, b: int, p: int) -> int:
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
    return _pmod(r, p)


def _pgcd(a: int, b: int) -> int:
    while b:
        a, b = b, _pmod(a, b)
    return a


def _prime_factors(n: int) -> list[int]:
    out, f = [], 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def is_irreducible(poly: int) -> bool:
    """Rabin's test for a GF(2) polynomial given as an int."""
    m = poly.bit_length() - 1
    if m < 1:
        return False
    if m == 1:
        return True
    if not poly & 1:
        return False

    def frob(k):
        # x^(2^k) mod poly
        t = 2
        for _ in range(k):
            t = _pmulmod(t, t, poly)
        return t

    if frob(m) != _pmod(2, poly):
        return False
    for q in _prime_factors(m):
        if _pgcd(poly, frob(m // q) ^ 2) != 1:
            return False
    return True


@lru_cache(maxsize=None)
def smallest_irreducible(m: int) -> int:
    """Lexicographically smallest irreducible polynomial of degree m."""
    if m < 2:
        raise ParameterError("extension degree must be at least 2")
    for low in range(1, 1 << m, 2):
        p = (1 << m) | low
        if is_irreducible(p):
            return p
    raise AssertionError("unreachable: irreducibles exist in every degree")


# -- the field ----------------------------------------------------------------

class GF2m:
    """GF(2^m) = GF(2)[x]/(modulus)."""

    def __init__(self, m: int, modulus: int | None = None):
        if m < 2:
            raise ParameterError("extension degree must be at least 2")
        if modulus is None:
            modulus = smallest_irreducible(m)
        if modulus.bit_length() - 1 != m:
            raise ParameterError(f"modulus degree {modulus.bit_length() - 1} != m={m}")
        if not is_irreducible(modulus):
            raise ParameterError(f"modulus {modulus:#x} is reducible")
        self.m = m
        self.modulus = modulus
        self.order = 1 << m
        self.mask = self.order - 1
        self.nbytes = (m + 7) // 8
        # low-order taps of the modulus, used by the bit-sliced kernels
        self.taps = tuple(i for i in range(m) if (modulus >> i) & 1)

    def __repr__(self):
        return f"GF2m(m={self.m}, modulus={self.modulus:#x})"

    def __eq__(self, other):
        return isinstance(other, GF2m) and (self.m, self.modulus) == (other.m, other.modulus)

    def __hash__(self):
        return hash((self.m, self.modulus))

    def add(self, a: int, b: int) -> int:
        return a ^ b

    def mul(self, a: int, b: int) -> int:
        m, mod = self.m, self.modulus
        if a.bit_length() < b.bit_length():
            a, b = b, a
        r = 0
        while b:
            if b & 1:
                r ^= a
            b >>= 1
            a <<= 1
            if a >> m:
                a ^= mod
        return r

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in GF(2^m)")
        u, v = a, self.modulus
        g1, g2 = 1, 0
        while u != 1:
            j = u.bit_length() - v.bit_length()
            if j < 0:
                u, v, g1, g2, j = v, u, g2, g1, -j
            u ^= v << j
            g1 ^= g2 << j
        return _pmod(g1, self.modulus)

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            a, e = self.inv(a), -e
        r = 1
        while e:
            if e & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            e >>= 1
        return r

    def random(self, rng) -> int:
        return rng.getrandbits(self.m)

    def random_nonzero(self, rng) -> int:
        while True:
            a = rng.getrandbits(self.m)
            if a:
                return a

    def __call__(self, value: int) -> "FieldElement":
        return FieldElement(self, value)

    # serialization: ceil(m/8) bytes, bit 0 of byte 0 = coefficient of x^0
    def to_bytes(self, a: int) -> bytes:
        return a.to_bytes(self.nbytes, "little")

    def from_bytes(self, data: bytes) -> int:
        a = int.from_bytes(data, "little")
        if a >> self.m:
            raise ParameterError("encoded element has bits beyond degree m-1")
        return a


@lru_cache(maxsize=None)
def field(m: int, modulus: int | None = None) -> GF2m:
    """Shared field instance per (m, modulus)."""
    return GF2m(m, modulus)


class FieldElement:
    __slots__ = ("field", "value")

    def __init__(self, fld: GF2m, value: int):
        value = int(value)
        if value < 0 or value >> fld.m:
            raise ParameterError(f"{value:#x} is not an element of GF(2^{fld.m})")
        self.field = fld
        self.value = value

    def _other(self, other):
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise ParameterError("operands live in different fields")
            return other.value
        if isinstance(other, int):
            return FieldElement(self.field, other).value
        return NotImplemented

    def __add__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.field, self.value ^ b)

    __radd__ = __add__
    __sub__ = __add__
    __rsub__ = __add__

    def __mul__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.field, self.field.mul(self.value, b))

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.field, self.field.mul(self.value, self.field.inv(b)))

    def __pow__(self, e: int):
        return FieldElement(self.field, self.field.pow(self.value, e))

    def __neg__(self):
        return self

    def inverse(self) -> "FieldElement":
        return FieldElement(self.field, self.field.inv(self.value))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.value == other.value
        if isinstance(other, int):
            return self.value == other
        return NotImplemented

    def __hash__(self):
        return hash((self.field, self.value))

    def __int__(self):
        return self.value

    __index__ = __int__

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"FieldElement({self.value:#x}, m={self.field.m})"


def fe_add(a: FieldElement, b: FieldElement) -> FieldElement:
    return a + b


def fe_mul(a: FieldElement, b: FieldElement) -> FieldElement:
    return a * b


def fe_inv(a: FieldElement) -> FieldElement:
    return a.inverse()


# -- echelon machinery on int bit-vectors ------------------------------------

def echelon(vectors: Iterable[int]) -> tuple[int, ...]:
    """Canonical reduced echelon basis (pivot = top bit) of the span."""
    rows: list[int] = []
    for v in vectors:
        v = int(v)
        for r in rows:
            v = min(v, v ^ r)
        if v:
            top = 1 << (v.bit_length() - 1)
            rows = [r ^ v if r & top else r for r in rows]
            rows.append(v)
            rows.sort(reverse=True)
    return tuple(rows)


def gf2_rank(vectors: Iterable[int]) -> int:
    return len(echelon(vectors))


def rank_weight(v: Sequence) -> int:
    """Rank of the m x n GF(2) expansion of v, i.e. dim of its support."""
    return gf2_rank(int(x) for x in v)


@dataclass(frozen=True)
class Subspace:
    field: GF2m
    basis: tuple[int, ...]

    @classmethod
    def span(cls, fld: GF2m, elements: Iterable) -> "Subspace":
        return cls(fld, echelon(int(x) for x in elements))

    @classmethod
    def zero(cls, fld: GF2m) -> "Subspace":
        return cls(fld, ())

    @classmethod
    def full(cls, fld: GF2m) -> "Subspace":
        return cls(fld, tuple(1 << i for i in reversed(range(fld.m))))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __len__(self):
        return self.dim

    def __contains__(self, x) -> bool:
        x = int(x)
        for r in self.basis:
            x = min(x, x ^ r)
        return x == 0

    def issubspace(self, other: "Subspace") -> bool:
        return all(b in other for b in self.basis)

    def elements(self):
        """All 2^dim elements, in Gray-code order.  Only for small dims."""
        x = 0
        yield x
        for i in range(1, 1 << self.dim):
            x ^= self.basis[(i & -i).bit_length() - 1]
            yield x

    def __add__(self, other: "Subspace") -> "Subspace":
        self._check(other)
        return Subspace(self.field, echelon(self.basis + other.basis))

    def _check(self, other):
        if self.field != other.field:
            raise ParameterError("subspaces of different fields")

    def intersect(self, other: "Subspace") -> "Subspace":
        return subspace_intersect(self, other)

    def scale(self, c) -> "Subspace":
        return subspace_scale(c, self)

    def to_bytes(self) -> bytes:
        return self.dim.to_bytes(2, "little") + b"".join(
            self.field.to_bytes(b) for b in self.basis)

    @classmethod
    def from_bytes(cls, fld: GF2m, data: bytes) -> "Subspace":
        dim = int.from_bytes(data[:2], "little")
        nb = fld.nbytes
        if len(data) != 2 + dim * nb:
            raise ParameterError("subspace encoding has the wrong length")
        elems = [fld.from_bytes(data[2 + i * nb: 2 + (i + 1) * nb]) for i in range(dim)]
        sub = cls.span(fld, elems)
        if sub.basis != tuple(elems):
            raise ParameterError("subspace encoding is not in canonical form")
        return sub


def support(fld: GF2m, v: Sequence) -> Subspace:
    return Subspace.span(fld, v)


def subspace_intersect(a: Subspace, b: Subspace) -> Subspace:
    """Zassenhaus: reduce [(a, a); (b, 0)], keep right halves of rows with empty left."""
    a._check(b)
    m = a.field.m
    rows = echelon([(x << m) | x for x in a.basis] + [y << m for y in b.basis])
    return Subspace(a.field, echelon(r for r in rows if r >> m == 0))


def subspace_scale(c, a: Subspace) -> Subspace:
    c = int(c)
    if c == 0:
        raise ParameterError("cannot scale a subspace by zero")
    mul = a.field.mul
    return Subspace(a.field, echelon(mul(c, x) for x in a.basis))


def product_space(f: Subspace, e: Subspace) -> Subspace:
    f._check(e)
    mul = f.field.mul
    return Subspace(f.field, echelon(mul(x, y) for x in f.basis for y in e.basis))


def random_independent(fld: GF2m, dim: int, rng) -> list[int]:
    """Uniform ordered tuple of dim GF(2)-independent elements."""
    if not 0 <= dim <= fld.m:
        raise ParameterError(f"dimension {dim} outside [0, {fld.m}]")
    out: list[int] = []
    ech: tuple[int, ...] = ()
    while len(out) < dim:
        x = fld.random(rng)
        e2 = echelon(ech + (x,))
        if len(e2) > len(ech):
            out.append(x)
            ech = e2
    return out


def sample_subspace(fld: GF2m, dim: int, rng) -> Subspace:
    if not 1 <= dim <= fld.m:
        raise ParameterError(f"subspace dimension {dim} outside [1, {fld.m}]")
    return Subspace.span(fld, random_independent(fld, dim, rng))


def random_full_rank_rows(nrows: int, ncols: int, rng) -> list[int]:
    """nrows independent rows of GF(2)^ncols, as int bitmasks (bit j = column j)."""
    if nrows > ncols:
        raise ParameterError("more rows than columns cannot be full rank")
    while True:
        rows = [rng.getrandbits(ncols) for _ in range(nrows)]
        if gf2_rank(rows) == nrows:
            return rows


def combine(basis: Sequence[int], coeff_rows: Sequence[int], n: int) -> list[int]:
    """e_j = sum_u coeff_rows[u]_j * basis[u]."""
    out = []
    for j in range(n):
        x = 0
        for u, row in enumerate(coeff_rows):
            if (row >> j) & 1:
                x ^= basis[u]
        out.append(x)
    return out


def sample_error(E: Subspace, n: int, r: int, rng) -> list[int]:
    """Length-n vector with entries in E and rank weight exactly r = dim E."""
    if n < r:
        raise ParameterError(f"cannot have rank {r} in length {n}")
    if E.dim != r:
        raise ParameterError(f"support has dim {E.dim}, expected {r}")
    if r == 0:
        return [0] * n
    return combine(E.basis, random_full_rank_rows(r, n, rng), n)


def gaussian_binomial(m: int, r: int, q: int = 2) -> int:
    """Number of r-dimensional subspaces of GF(q)^m."""
    if r < 0 or r > m:
        return 0
    num = den = 1
    for i in range(r):
        num *= q ** (m - i) - 1
        den *= q ** (i + 1) - 1
    return num // den
