"""Dense matrices over GF(2^m) and GF(2), plus circulant structure.

``ExtMatrix`` stores a (rows, cols, m) uint8 bit tensor: bits[i, j, a] is the
coefficient of x^a in entry (i, j).  Products go through float32 BLAS on bit
planes (exact while the inner dimension stays below 2^24) followed by a Horner
pass that multiplies by x and folds the modulus taps back in.  This keeps one
code path for every m, including m > 64.

``BaseMatrix`` holds a (rows, cols) uint8 0/1 array; elimination runs on rows
packed into Python ints (bit j = column j).
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ShapeError, SingularMatrixError, StructureError
from .galois import GF2m

_F32 = np.float32
# cap on float32 elements materialized per BLAS call in the Horner product
_CHUNK = 1 << 22


# -- int <-> bit-plane conversion ---------------------------------------------

def ints_to_bits(values, m: int) -> np.ndarray:
    """Array of ints (any shape) -> uint8 array of shape (..., m)."""
    if m <= 64:
        arr = np.asarray(values, dtype=np.uint64)
        shape = arr.shape
        raw = np.ascontiguousarray(arr.astype("<u8")).view(np.uint8).reshape(shape + (8,))
        return np.unpackbits(raw, axis=-1, bitorder="little")[..., :m].copy()
    obj = np.asarray(values, dtype=object)
    shape = obj.shape
    nb = (m + 7) // 8
    buf = b"".join(int(x).to_bytes(nb, "little") for x in obj.ravel())
    raw = np.frombuffer(buf, dtype=np.uint8).reshape(shape + (nb,))
    return np.unpackbits(raw, axis=-1, bitorder="little")[..., :m].copy()


def bits_to_ints(bits: np.ndarray) -> list:
    """Inverse of ints_to_bits; returns nested Python lists of ints."""
    bits = np.asarray(bits, dtype=np.uint8)
    packed = np.packbits(bits, axis=-1, bitorder="little")
    nb = packed.shape[-1]
    if nb <= 8:
        pad = np.zeros(packed.shape[:-1] + (8,), dtype=np.uint8)
        pad[..., :nb] = packed
        return np.ascontiguousarray(pad).view("<u8")[..., 0].tolist()
    flat = packed.reshape(-1, nb)
    vals = [int.from_bytes(row.tobytes(), "little") for row in flat]
    return np.array(vals, dtype=object).reshape(packed.shape[:-1]).tolist()


def _bits_to_int(v: np.ndarray) -> int:
    return int.from_bytes(np.packbits(v, bitorder="little").tobytes(), "little")


def _parity(x: np.ndarray) -> np.ndarray:
    return (x.astype(np.int32) & 1).astype(np.uint8)


def _mulx(fld: GF2m, bits: np.ndarray) -> np.ndarray:
    """Multiply every element of a bit tensor by x."""
    out = np.empty_like(bits)
    out[..., 1:] = bits[..., :-1]
    out[..., 0] = 0
    top = bits[..., -1:]
    out[..., list(fld.taps)] ^= top
    return out


def _shift_table(fld: GF2m, v: np.ndarray) -> np.ndarray:
    """Rows x^a * v for a < m, flattened to (m, len(v)*m) float32."""
    m = fld.m
    out = np.empty((m,) + v.shape, dtype=np.uint8)
    cur = v
    for a in range(m):
        out[a] = cur
        cur = _mulx(fld, cur)
    return out.reshape(m, -1).astype(_F32)


def _mult_matrix(fld: GF2m, c: int) -> np.ndarray:
    """(m, m) matrix whose row a holds the bits of c * x^a."""
    return ints_to_bits([fld.mul(c, 1 << a) for a in range(fld.m)], fld.m)


def _scale_bits(fld: GF2m, v: np.ndarray, c: int) -> np.ndarray:
    return _parity(v.astype(_F32) @ _mult_matrix(fld, c).astype(_F32))


# -- GF(2) row-int elimination ------------------------------------------------

def _gf2_rref(rows: list[int], ncols: int) -> tuple[list[int], list[int]]:
    rows = list(rows)
    piv: list[int] = []
    r = 0
    n = len(rows)
    for c in range(ncols):
        if r == n:
            break
        bit = 1 << c
        for i in range(r, n):
            if rows[i] & bit:
                break
        else:
            continue
        rows[r], rows[i] = rows[i], rows[r]
        pr = rows[r]
        for i in range(n):
            if i != r and rows[i] & bit:
                rows[i] ^= pr
        piv.append(c)
        r += 1
    return rows, piv


# -- matrix types -------------------------------------------------------------

def _norm_key(key):
    if not isinstance(key, tuple):
        key = (key, slice(None))
    return tuple(slice(k, k + 1) if isinstance(k, (int, np.integer)) else k for k in key)


class BaseMatrix:
    """Matrix over GF(2)."""
    __slots__ = ("bits",)

    def __init__(self, bits):
        bits = np.asarray(bits, dtype=np.uint8)
        if bits.ndim != 2:
            raise ShapeError("BaseMatrix needs a 2-D array")
        self.bits = bits & 1

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "BaseMatrix":
        return cls(np.zeros((nrows, ncols), dtype=np.uint8))

    @classmethod
    def identity(cls, n: int) -> "BaseMatrix":
        return cls(np.eye(n, dtype=np.uint8))

    @classmethod
    def from_row_ints(cls, rows: Sequence[int], ncols: int) -> "BaseMatrix":
        nb = max(1, (ncols + 7) // 8)
        buf = b"".join(int(r).to_bytes(nb, "little") for r in rows)
        raw = np.frombuffer(buf, dtype=np.uint8).reshape(len(rows), nb)
        return cls(np.unpackbits(raw, axis=1, bitorder="little")[:, :ncols])

    def row_ints(self) -> list[int]:
        packed = np.packbits(self.bits, axis=1, bitorder="little")
        return [int.from_bytes(r.tobytes(), "little") for r in packed]

    @property
    def shape(self) -> tuple[int, int]:
        return self.bits.shape

    @property
    def T(self) -> "BaseMatrix":
        return BaseMatrix(self.bits.T.copy())

    def __getitem__(self, key):
        if isinstance(key, tuple) and all(isinstance(k, (int, np.integer)) for k in key):
            return int(self.bits[key])
        return BaseMatrix(self.bits[_norm_key(key)])

    def __add__(self, other: "BaseMatrix") -> "BaseMatrix":
        if self.shape != other.shape:
            raise ShapeError(f"cannot add {self.shape} and {other.shape}")
        return BaseMatrix(self.bits ^ other.bits)

    __sub__ = __add__

    def __eq__(self, other):
        return isinstance(other, BaseMatrix) and self.shape == other.shape and \
            bool(np.array_equal(self.bits, other.bits))

    __hash__ = None

    def __matmul__(self, other):
        return mat_mul(self, other)

    def is_identity(self) -> bool:
        n, c = self.shape
        return n == c and bool(np.array_equal(self.bits, np.eye(n, dtype=np.uint8)))

    def rank(self) -> int:
        return len(_gf2_rref(self.row_ints(), self.shape[1])[1])

    def to_ext(self, fld: GF2m) -> "ExtMatrix":
        bits = np.zeros(self.shape + (fld.m,), dtype=np.uint8)
        bits[..., 0] = self.bits
        return ExtMatrix(fld, bits)

    def to_bytes(self) -> bytes:
        r, c = self.shape
        return struct.pack("<II", r, c) + self.bits.tobytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "BaseMatrix":
        r, c = struct.unpack_from("<II", data)
        body = np.frombuffer(data, dtype=np.uint8, offset=8)
        if body.size != r * c or (body > 1).any():
            raise ShapeError("malformed GF(2) matrix encoding")
        return cls(body.reshape(r, c).copy())

    def __repr__(self):
        return f"BaseMatrix({self.shape[0]}x{self.shape[1]})"


class ExtMatrix:
    """Matrix over GF(2^m), bit-sliced."""
    __slots__ = ("field", "bits", "_f32")

    def __init__(self, fld: GF2m, bits):
        bits = np.asarray(bits, dtype=np.uint8)
        if bits.ndim != 3 or bits.shape[2] != fld.m:
            raise ShapeError(f"expected (rows, cols, {fld.m}) bits, got {bits.shape}")
        self.field = fld
        self.bits = bits
        self._f32 = None

    @classmethod
    def from_ints(cls, fld: GF2m, rows) -> "ExtMatrix":
        arr = np.asarray(rows, dtype=object)
        if arr.ndim == 1:
            arr = arr.reshape(1, -1)
        if arr.ndim != 2:
            raise ShapeError("from_ints needs a 2-D array of ints")
        if arr.size and any(int(x) >> fld.m or int(x) < 0 for x in arr.ravel()):
            raise ShapeError(f"entries must be elements of GF(2^{fld.m})")
        if arr.size == 0:
            return cls(fld, np.zeros(arr.shape + (fld.m,), dtype=np.uint8))
        return cls(fld, ints_to_bits(arr.tolist(), fld.m))

    @classmethod
    def zeros(cls, fld: GF2m, nrows: int, ncols: int) -> "ExtMatrix":
        return cls(fld, np.zeros((nrows, ncols, fld.m), dtype=np.uint8))

    @classmethod
    def identity(cls, fld: GF2m, n: int) -> "ExtMatrix":
        return BaseMatrix.identity(n).to_ext(fld)

    @property
    def shape(self) -> tuple[int, int]:
        return self.bits.shape[:2]

    def to_ints(self) -> list[list[int]]:
        return bits_to_ints(self.bits)

    def row(self, i: int) -> list[int]:
        return bits_to_ints(self.bits[i])

    def f32(self) -> np.ndarray:
        """Cached (rows, cols*m) float32 view used as the right operand of products."""
        if self._f32 is None:
            r, c, m = self.bits.shape
            self._f32 = self.bits.reshape(r, c * m).astype(_F32)
        return self._f32

    def __getitem__(self, key):
        if isinstance(key, tuple) and all(isinstance(k, (int, np.integer)) for k in key):
            return _bits_to_int(self.bits[key])
        return ExtMatrix(self.field, self.bits[_norm_key(key)])

    @property
    def T(self) -> "ExtMatrix":
        return ExtMatrix(self.field, np.ascontiguousarray(self.bits.transpose(1, 0, 2)))

    def _same(self, other):
        if not isinstance(other, ExtMatrix) or other.field != self.field:
            raise ShapeError("operands must be matrices over the same field")
        if self.shape != other.shape:
            raise ShapeError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "ExtMatrix") -> "ExtMatrix":
        self._same(other)
        return ExtMatrix(self.field, self.bits ^ other.bits)

    __sub__ = __add__

    def __eq__(self, other):
        return isinstance(other, ExtMatrix) and other.field == self.field and \
            self.shape == other.shape and bool(np.array_equal(self.bits, other.bits))

    __hash__ = None

    def __matmul__(self, other):
        return mat_mul(self, other)

    def __rmatmul__(self, other):
        return mat_mul(other, self)

    def is_zero(self) -> bool:
        return not self.bits.any()

    def rank(self) -> int:
        return len(_ext_rref_bits(self.field, self.bits, self.shape[1])[1])

    def scale(self, c: int) -> "ExtMatrix":
        r, k, m = self.bits.shape
        out = _scale_bits(self.field, self.bits.reshape(r * k, m), c)
        return ExtMatrix(self.field, out.reshape(r, k, m))

    @staticmethod
    def hstack(mats: Sequence["ExtMatrix"]) -> "ExtMatrix":
        return ExtMatrix(mats[0].field, np.concatenate([a.bits for a in mats], axis=1))

    @staticmethod
    def vstack(mats: Sequence["ExtMatrix"]) -> "ExtMatrix":
        return ExtMatrix(mats[0].field, np.concatenate([a.bits for a in mats], axis=0))

    def to_bytes(self) -> bytes:
        r, c = self.shape
        nb = self.field.nbytes
        packed = np.packbits(self.bits, axis=-1, bitorder="little")
        return struct.pack("<II", r, c) + packed.reshape(r * c, nb).tobytes()

    @classmethod
    def from_bytes(cls, fld: GF2m, data: bytes) -> "ExtMatrix":
        r, c = struct.unpack_from("<II", data)
        nb = fld.nbytes
        body = np.frombuffer(data, dtype=np.uint8, offset=8)
        if body.size != r * c * nb:
            raise ShapeError("malformed extension-field matrix encoding")
        bits = np.unpackbits(body.reshape(r, c, nb), axis=-1, bitorder="little")
        if bits[..., fld.m:].any():
            raise ShapeError("encoded entry exceeds the field degree")
        return cls(fld, bits[..., :fld.m].copy())

    def __repr__(self):
        return f"ExtMatrix({self.shape[0]}x{self.shape[1]} over GF(2^{self.field.m}))"


Matrix = BaseMatrix | ExtMatrix


# -- products -----------------------------------------------------------------

def _ext_ext(fld: GF2m, A: np.ndarray, Bf: np.ndarray, c: int) -> np.ndarray:
    r, k, m = A.shape
    acc = np.zeros((r, c, m), dtype=np.uint8)
    if r == 0 or c == 0:
        return acc
    planes = np.ascontiguousarray(A.transpose(2, 0, 1)).astype(_F32)  # (m, r, k)
    per = max(1, min(m, _CHUNK // max(1, r * c * m)))
    hi = m
    while hi > 0:
        lo = max(0, hi - per)
        Y = _parity(planes[lo:hi].reshape((hi - lo) * r, k) @ Bf).reshape(hi - lo, r, c, m)
        for t in range(hi - lo - 1, -1, -1):
            acc = _mulx(fld, acc)
            acc ^= Y[t]
        hi = lo
    return acc


def mat_mul(A: Matrix, B: Matrix) -> Matrix:
    """Product over GF(2) or GF(2^m); GF(2) operands embed into GF(2^m)."""
    if A.shape[1] != B.shape[0]:
        raise ShapeError(f"cannot multiply {A.shape} by {B.shape}")
    if isinstance(A, BaseMatrix) and isinstance(B, BaseMatrix):
        return BaseMatrix(_parity(A.bits.astype(_F32) @ B.bits.astype(_F32)))
    if isinstance(A, BaseMatrix):
        k, c, m = B.bits.shape
        out = _parity(A.bits.astype(_F32) @ B.f32())
        return ExtMatrix(B.field, out.reshape(A.shape[0], c, m))
    if isinstance(B, BaseMatrix):
        r, k, m = A.bits.shape
        planes = A.bits.transpose(0, 2, 1).reshape(r * m, k).astype(_F32)
        out = _parity(planes @ B.bits.astype(_F32)).reshape(r, m, B.shape[1])
        return ExtMatrix(A.field, np.ascontiguousarray(out.transpose(0, 2, 1)))
    if A.field != B.field:
        raise ShapeError("matrices over different fields")
    return ExtMatrix(A.field, _ext_ext(A.field, A.bits, B.f32(), B.shape[1]))


def vec_mat(fld: GF2m, v: Sequence[int], M: Matrix) -> list[int]:
    """Row vector times matrix, vectors as lists of ints."""
    out = mat_mul(ExtMatrix.from_ints(fld, [list(v)]), M)
    return out.row(0)


def bits_vec_mat(v: Sequence[int], M: BaseMatrix, fld: GF2m) -> list[int]:
    """Row vector over GF(2^m) times a GF(2) matrix."""
    return vec_mat(fld, v, M)


# -- elimination --------------------------------------------------------------

def _ext_rref_bits(fld: GF2m, W: np.ndarray, ncols: int):
    W = W.copy()
    N, M, m = W.shape
    piv: list[int] = []
    r = 0
    for c in range(ncols):
        if r == N:
            break
        nz = np.flatnonzero(W[r:, c, :].any(axis=1))
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            W[[r, p]] = W[[p, r]]
        inv = fld.inv(_bits_to_int(W[r, c]))
        W[r, c:] = _scale_bits(fld, W[r, c:], inv)
        f = W[:, c, :].copy()
        f[r] = 0
        rows = np.flatnonzero(f.any(axis=1))
        if rows.size:
            L = _shift_table(fld, W[r, c:])
            upd = _parity(f[rows].astype(_F32) @ L).reshape(rows.size, M - c, m)
            W[rows, c:] ^= upd
        piv.append(c)
        r += 1
    return W, piv


def rref(A: Matrix):
    """Return (R, rank, T) with R = T @ A in reduced row-echelon form."""
    n, c = A.shape
    if isinstance(A, BaseMatrix):
        rows = [a | (1 << (c + i)) for i, a in enumerate(A.row_ints())]
        rows, piv = _gf2_rref(rows, c)
        mask = (1 << c) - 1
        R = BaseMatrix.from_row_ints([x & mask for x in rows], c)
        T = BaseMatrix.from_row_ints([x >> c for x in rows], n)
        return R, len(piv), T
    aug = np.concatenate([A.bits, ExtMatrix.identity(A.field, n).bits], axis=1)
    W, piv = _ext_rref_bits(A.field, aug, c)
    return ExtMatrix(A.field, W[:, :c]), len(piv), ExtMatrix(A.field, W[:, c:])


def invert(A: Matrix) -> Matrix:
    n, c = A.shape
    if n != c:
        raise ShapeError("only square matrices can be inverted")
    R, rank, T = rref(A)
    if rank < n:
        raise SingularMatrixError(f"matrix has rank {rank} < {n}")
    return T


def solve(A: Matrix, b: Sequence[int]):
    """Some x with A @ x = b (free variables zero), or None if inconsistent."""
    n, c = A.shape
    if len(b) != n:
        raise ShapeError(f"rhs length {len(b)} != {n} rows")
    if isinstance(A, BaseMatrix):
        rows = [a | ((int(bi) & 1) << c) for a, bi in zip(A.row_ints(), b)]
        rows, piv = _gf2_rref(rows, c)
        if any(x >> c for x in rows[len(piv):]):
            return None
        x = [0] * c
        for i, col in enumerate(piv):
            x[col] = (rows[i] >> c) & 1
        return x
    fld = A.field
    col = ints_to_bits([[int(v)] for v in b], fld.m) if n else np.zeros((0, 1, fld.m), np.uint8)
    W, piv = _ext_rref_bits(fld, np.concatenate([A.bits, col], axis=1), c)
    if W[len(piv):, c].any():
        return None
    x = [0] * c
    rhs = bits_to_ints(W[:, c]) if n else []
    for i, pc in enumerate(piv):
        x[pc] = rhs[i]
    return x


def nullspace(A: Matrix) -> Matrix:
    """Rows spanning {x : A @ x = 0}."""
    n, c = A.shape
    R, rank, _ = rref(A)
    piv = []
    if isinstance(A, BaseMatrix):
        rr = R.bits
        for i in range(rank):
            piv.append(int(np.flatnonzero(rr[i])[0]))
        free = [j for j in range(c) if j not in piv]
        out = np.zeros((len(free), c), dtype=np.uint8)
        for t, f in enumerate(free):
            out[t, f] = 1
            for i, pc in enumerate(piv):
                out[t, pc] = rr[i, f]
        return BaseMatrix(out)
    rb = R.bits
    for i in range(rank):
        piv.append(int(np.flatnonzero(rb[i].any(axis=1))[0]))
    free = [j for j in range(c) if j not in piv]
    out = np.zeros((len(free), c, A.field.m), dtype=np.uint8)
    for t, f in enumerate(free):
        out[t, f, 0] = 1
        for i, pc in enumerate(piv):
            out[t, pc] = rb[i, f]
    return ExtMatrix(A.field, out)


# -- circulants ---------------------------------------------------------------

def _circ_index(j: int) -> np.ndarray:
    i = np.arange(j)
    return (i[None, :] - i[:, None]) % j


@dataclass(frozen=True)
class CirculantBlock:
    """j x j circulant; row i is first_row cyclically shifted right by i."""
    first_row: tuple[int, ...]
    field: GF2m | None = None

    @property
    def size(self) -> int:
        return len(self.first_row)

    def to_bytes(self) -> bytes:
        head = b"C" + struct.pack("<I", self.size)
        if self.field is None:
            return head + bytes(self.first_row)
        return head + b"".join(self.field.to_bytes(x) for x in self.first_row)

    @classmethod
    def from_bytes(cls, data: bytes, fld: GF2m | None = None) -> "CirculantBlock":
        if data[:1] != b"C":
            raise StructureError("missing circulant tag")
        (j,) = struct.unpack_from("<I", data, 1)
        body = data[5:]
        if fld is None:
            if len(body) != j:
                raise StructureError("circulant body length mismatch")
            return cls(tuple(body))
        nb = fld.nbytes
        if len(body) != j * nb:
            raise StructureError("circulant body length mismatch")
        return cls(tuple(fld.from_bytes(body[i * nb:(i + 1) * nb]) for i in range(j)), fld)


def circulant_expand(c: CirculantBlock) -> Matrix:
    idx = _circ_index(c.size)
    if c.field is None:
        return BaseMatrix(np.asarray(c.first_row, dtype=np.uint8)[idx])
    return ExtMatrix(c.field, ints_to_bits(list(c.first_row), c.field.m)[idx])


def _is_circulant(bits: np.ndarray) -> bool:
    j = bits.shape[0]
    if bits.shape[1] != j:
        return False
    return bool(np.array_equal(bits, bits[0][_circ_index(j)]))


def circulant_compress(A: Matrix) -> CirculantBlock:
    if not _is_circulant(A.bits):
        raise StructureError("matrix is not circulant")
    if isinstance(A, BaseMatrix):
        return CirculantBlock(tuple(int(x) for x in A.bits[0]))
    return CirculantBlock(tuple(A.row(0)), A.field)


def block_circulant(blocks: Sequence[Sequence[CirculantBlock]]) -> Matrix:
    """Assemble a block matrix whose blocks are all circulant of one size."""
    mats = [[circulant_expand(b) for b in row] for row in blocks]
    if isinstance(mats[0][0], BaseMatrix):
        return BaseMatrix(np.block([[m.bits for m in row] for row in mats]))
    rows = [np.concatenate([m.bits for m in row], axis=1) for row in mats]
    return ExtMatrix(mats[0][0].field, np.concatenate(rows, axis=0))


def block_circulant_compress(A: Matrix, j: int) -> list[list[CirculantBlock]]:
    r, c = A.shape
    if r % j or c % j:
        raise StructureError(f"{A.shape} is not a multiple of block size {j}")
    return [[circulant_compress(A[bi * j:(bi + 1) * j, bj * j:(bj + 1) * j])
             for bj in range(c // j)] for bi in range(r // j)]


def random_circulant(j: int, fld: GF2m | None, rng) -> CirculantBlock:
    if fld is None:
        x = rng.getrandbits(j)
        return CirculantBlock(tuple((x >> t) & 1 for t in range(j)))
    return CirculantBlock(tuple(fld.random(rng) for _ in range(j)), fld)


def random_matrix(nrows: int, ncols: int, fld: GF2m | None, rng) -> Matrix:
    if fld is None:
        return BaseMatrix.from_row_ints([rng.getrandbits(ncols) for _ in range(nrows)], ncols)
    return ExtMatrix.from_ints(fld, [[fld.random(rng) for _ in range(ncols)]
                                     for _ in range(nrows)])


def random_invertible(n: int, fld: GF2m | None, rng, block: int | None = None,
                      max_attempts: int = 1000) -> Matrix:
    """Uniform invertible n x n matrix, dense or block-circulant with block size ``block``."""
    if block is not None and n % block:
        raise ShapeError(f"block size {block} does not divide {n}")
    for _ in range(max_attempts):
        if block is None:
            A = random_matrix(n, n, fld, rng)
        else:
            nb = n // block
            A = block_circulant([[random_circulant(block, fld, rng) for _ in range(nb)]
                                 for _ in range(nb)])
        if A.rank() == n:
            return A
    raise SingularMatrixError(f"no invertible matrix after {max_attempts} draws")
