"""LRPC codes and the rank-syndrome decoder (A-matrix and K-matrix forms)."""
from __future__ import annotations

import enum
import threading
from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np

from .errors import GenerationError, ParameterError, ShapeError
from .galois import GF2m, Subspace, echelon, random_independent, subspace_intersect, subspace_scale
from .matrix import BaseMatrix, ExtMatrix, _circ_index, _gf2_rref, ints_to_bits, mat_mul

STRUCTURES = ("dense", "qc3", "qc4")


class Failure(enum.Enum):
    PRODUCT_SPACE = "ProductSpaceDeficient"
    SUPPORT_TOO_LARGE = "SupportTooLarge"
    SYSTEM_SINGULAR = "SystemSingular"
    INCONSISTENT = "Inconsistent"


@dataclass(frozen=True)
class DecodeOutcome:
    error: list[int] | None
    failure: Failure | None = None
    support: Subspace | None = None

    @property
    def ok(self) -> bool:
        return self.failure is None


class LrpcCode:
    """Parity-check matrix H (nk x n) with entries in span(F_1..F_d).

    coeffs[i, j, v] is the GF(2) coefficient h_ijv of F_v in H[i, j].
    """

    def __init__(self, fld: GF2m, F_basis: Sequence[int], coeffs: np.ndarray,
                 structure: str = "dense"):
        coeffs = np.asarray(coeffs, dtype=np.uint8) & 1
        if coeffs.ndim != 3 or coeffs.shape[2] != len(F_basis):
            raise ShapeError("coeffs must have shape (nk, n, d)")
        if len(echelon(F_basis)) != len(F_basis):
            raise ParameterError("F basis elements must be independent")
        self.field = fld
        self.F_basis = tuple(int(f) for f in F_basis)
        self.F_space = Subspace.span(fld, self.F_basis)
        self.coeffs = coeffs
        self.structure = structure
        self.nk, self.n, self.d = coeffs.shape
        fb = ints_to_bits(list(self.F_basis), fld.m).astype(np.float32)
        hb = (coeffs.reshape(-1, self.d).astype(np.float32) @ fb).astype(np.int32) & 1
        self.H = ExtMatrix(fld, hb.astype(np.uint8).reshape(self.nk, self.n, fld.m))
        self._dm: dict = {}
        self._lock = threading.Lock()

    def expand_A(self, r: int) -> BaseMatrix:
        return expand_A(self, r)

    def expand_K(self, r: int = 1) -> BaseMatrix:
        return expand_K(self, r)

    def __repr__(self):
        return f"LrpcCode(n={self.n}, nk={self.nk}, d={self.d}, m={self.field.m}, {self.structure})"


def _coeff_first_rows(structure: str, n: int, nk: int, d: int, rng) -> np.ndarray:
    if structure == "dense":
        rows = [rng.getrandbits(n * d) for _ in range(nk)]
        bits = ints_to_bits(rows, n * d) if n * d <= 64 else _bigbits(rows, n * d)
        return bits.reshape(nk, n, d)
    j = n // (3 if structure == "qc3" else 4)
    br, bc = nk // j, n // j
    idx = _circ_index(j)
    out = np.zeros((nk, n, d), dtype=np.uint8)
    for a in range(br):
        for b in range(bc):
            for v in range(d):
                x = rng.getrandbits(j)
                first = np.array([(x >> t) & 1 for t in range(j)], dtype=np.uint8)
                out[a * j:(a + 1) * j, b * j:(b + 1) * j, v] = first[idx]
    return out


def _bigbits(rows, width):
    nb = (width + 7) // 8
    raw = np.frombuffer(b"".join(x.to_bytes(nb, "little") for x in rows), dtype=np.uint8)
    return np.unpackbits(raw.reshape(len(rows), nb), axis=1, bitorder="little")[:, :width]


def check_structure(n: int, nk: int, structure: str) -> None:
    if structure not in STRUCTURES:
        raise ParameterError(f"unknown structure {structure!r}")
    if not 0 < nk < n:
        raise ParameterError(f"need 0 < nk < n, got nk={nk}, n={n}")
    if structure == "qc3" and (n % 3 or nk != n // 3):
        raise ParameterError("qc3 needs 3 | n and nk = n/3")
    if structure == "qc4" and (n % 4 or nk != n // 2):
        raise ParameterError("qc4 needs 4 | n and nk = n/2")


def gen_lrpc(n: int, nk: int, d: int, fld: GF2m, rng, structure: str = "dense",
             F_basis: Sequence[int] | None = None, max_attempts: int = 64) -> LrpcCode:
    """Random LRPC code; resampled until H has full row rank and, when
    nk*d >= n, until the K-expansion has a decoding matrix."""
    check_structure(n, nk, structure)
    if d < 1 or d > fld.m:
        raise ParameterError(f"d={d} outside [1, {fld.m}]")
    for _ in range(max_attempts):
        basis = list(F_basis) if F_basis is not None else random_independent(fld, d, rng)
        code = LrpcCode(fld, basis, _coeff_first_rows(structure, n, nk, d, rng), structure)
        if code.H.rank() < nk:
            continue
        if nk * d >= n and expand_K(code).rank() < n:
            continue
        return code
    raise GenerationError(f"no usable LRPC code after {max_attempts} attempts")


def syndrome(code: LrpcCode, y: Sequence[int]) -> list[int]:
    if len(y) != code.n:
        raise ShapeError(f"word length {len(y)} != n={code.n}")
    return mat_mul(ExtMatrix.from_ints(code.field, [list(y)]), code.H.T).row(0)


def expand_A(code: LrpcCode, r: int) -> BaseMatrix:
    """(nk*r*d) x (n*r): entry (u + v*r + i*r*d, u + j*r) = h_ijv."""
    if r < 1:
        raise ParameterError("r must be >= 1")
    nk, n, d = code.coeffs.shape
    A5 = np.zeros((nk, d, r, n, r), dtype=np.uint8)
    hv = code.coeffs.transpose(0, 2, 1)  # (nk, d, n)
    for u in range(r):
        A5[:, :, u, :, u] = hv
    return BaseMatrix(A5.reshape(nk * d * r, n * r))


def expand_K(code: LrpcCode, r: int = 1) -> BaseMatrix:
    """(nk*d) x n: entry (i + nk*v, j) = h_ijv.  r only changes how it is applied."""
    if r < 1:
        raise ParameterError("r must be >= 1")
    nk, n, d = code.coeffs.shape
    return BaseMatrix(code.coeffs.transpose(2, 0, 1).reshape(d * nk, n))


def _first_full_rank_rows(rows: list[int]) -> list[int]:
    """Indices of the lexicographically first maximal independent row subset."""
    basis: dict[int, int] = {}
    picked = []
    for idx, x in enumerate(rows):
        while x:
            p = x.bit_length() - 1
            if p not in basis:
                basis[p] = x
                picked.append(idx)
                break
            x ^= basis[p]
    return picked


def decoding_matrix(code: LrpcCode, r: int, variant: str = "K"):
    """(selected row indices, inverse rows as ints) or None when no
    invertible square submatrix exists.  Cached per (variant, r)."""
    key = (variant, r if variant == "A" else 1)
    with code._lock:
        if key in code._dm:
            return code._dm[key]
        M = expand_A(code, r) if variant == "A" else expand_K(code)
        ncols = M.shape[1]
        rows = M.row_ints()
        J = _first_full_rank_rows(rows)
        result = None
        if len(J) == ncols:
            aug = [rows[t] | (1 << (ncols + k)) for k, t in enumerate(J)]
            red, piv = _gf2_rref(aug, ncols)
            # red[c] has pivot in column c; its right half is row c of the inverse
            result = (J, [x >> ncols for x in red])
        code._dm[key] = result
        return result


def _parity(x: int) -> int:
    return x.bit_count() & 1


def _express(products: list[int], targets: Sequence[int]):
    """Coordinates (bitmask over products) of each target, None if outside the span.
    Also returns whether the products are independent."""
    basis: dict[int, tuple[int, int]] = {}
    indep = True
    for t, p in enumerate(products):
        x, mk = p, 1 << t
        while x:
            top = x.bit_length() - 1
            if top not in basis:
                basis[top] = (x, mk)
                break
            bx, bm = basis[top]
            x ^= bx
            mk ^= bm
        if not x:
            indep = False
    coords = []
    for s in targets:
        x, mk = s, 0
        while x:
            top = x.bit_length() - 1
            if top not in basis:
                return None, indep
            bx, bm = basis[top]
            x ^= bx
            mk ^= bm
        coords.append(mk)
    return coords, indep


def _solve_expanded(code: LrpcCode, s: Sequence[int], Eb: Sequence[int]):
    """Direct GF(2) system (nk*m equations, n*dimE unknowns) for e with support in E."""
    fld = code.field
    rE = len(Eb)
    nk, n, m = code.nk, code.n, fld.m
    stack = np.stack([code.H.scale(E).bits for E in Eb])        # (rE, nk, n, m)
    M = BaseMatrix(stack.transpose(1, 3, 2, 0).reshape(nk * m, n * rE))
    rhs = ints_to_bits(list(s), m).reshape(-1) if m <= 64 else \
        np.asarray(_bigbits([int(x) for x in s], m)).reshape(-1)
    rows = [a | (int(b) << (n * rE)) for a, b in zip(M.row_ints(), rhs)]
    red, piv = _gf2_rref(rows, n * rE)
    if any(x >> (n * rE) for x in red[len(piv):]):
        return Failure.INCONSISTENT, None
    if len(piv) < n * rE:
        return Failure.SYSTEM_SINGULAR, None
    x = [(red[c] >> (n * rE)) & 1 for c in range(n * rE)]
    return None, [sum(x[j * rE + u] << u for u in range(rE)) for j in range(n)]


def _combine(Eb, masks) -> list[int]:
    out = []
    for mk in masks:
        v = 0
        u = 0
        while mk:
            if mk & 1:
                v ^= Eb[u]
            mk >>= 1
            u += 1
        out.append(v)
    return out


def decode(code: LrpcCode, s: Sequence[int], r: int, variant: str = "K") -> DecodeOutcome:
    """Recover e of rank <= r with H e^T = s, or report why that failed."""
    if variant not in ("A", "K"):
        raise ParameterError(f"unknown decoder variant {variant!r}")
    if len(s) != code.nk:
        raise ShapeError(f"syndrome length {len(s)} != nk={code.nk}")
    if r < 0 or r * code.d > code.nk:
        raise ParameterError(f"need 0 <= r*d <= nk (r={r}, d={code.d}, nk={code.nk})")
    fld = code.field
    s = [int(x) for x in s]
    if not any(s):
        return DecodeOutcome([0] * code.n, None, Subspace.zero(fld))
    if r == 0:
        return DecodeOutcome(None, Failure.SUPPORT_TOO_LARGE)

    S = Subspace.span(fld, s)
    E = None
    for F in code.F_basis:
        Si = subspace_scale(fld.inv(F), S)
        E = Si if E is None else subspace_intersect(E, Si)
    if E.dim > r:
        return DecodeOutcome(None, Failure.SUPPORT_TOO_LARGE, E)
    if E.dim == 0:
        return DecodeOutcome(None, Failure.PRODUCT_SPACE, E)

    Eb = E.basis
    rE = len(Eb)
    d = code.d
    products = [fld.mul(F, Eu) for F in code.F_basis for Eu in Eb]   # index v*rE + u
    coords, indep = _express(products, s)
    if coords is None:
        return DecodeOutcome(None, Failure.PRODUCT_SPACE, E)

    if not indep:
        why, masks = _solve_expanded(code, s, Eb)
        if why is not None:
            return DecodeOutcome(None, why, E)
    else:
        dm = decoding_matrix(code, rE, variant)
        if dm is None:
            return DecodeOutcome(None, Failure.SYSTEM_SINGULAR, E)
        J, D = dm
        if variant == "A":
            big = 0
            for i, c in enumerate(coords):
                big |= c << (i * rE * d)
            sel = 0
            for t, row in enumerate(J):
                sel |= ((big >> row) & 1) << t
            flat = [_parity(Dr & sel) for Dr in D]          # index u + j*rE
            masks = [sum(flat[j * rE + u] << u for u in range(rE)) for j in range(code.n)]
        else:
            nk = code.nk
            masks = [0] * code.n
            for u in range(rE):
                sel = 0
                for t, row in enumerate(J):
                    i, v = row % nk, row // nk
                    sel |= ((coords[i] >> (v * rE + u)) & 1) << t
                for j, Dr in enumerate(D):
                    masks[j] |= _parity(Dr & sel) << u

    e = _combine(Eb, masks)
    if syndrome(code, e) != s:
        return DecodeOutcome(None, Failure.INCONSISTENT, E)
    return DecodeOutcome(e, None, E)


def failure_probability(n: int, nk: int, r: int, d: int, q: int = 2) -> float:
    """Predicted decoding failure rate q^-(nk + 1 - r*d)."""
    if r * d > nk:
        raise ParameterError(f"r*d = {r * d} exceeds nk = {nk}")
    if not 0 < nk < n:
        raise ParameterError("need 0 < nk < n")
    return float(q) ** -(nk + 1 - r * d)
