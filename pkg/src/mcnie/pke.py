"""The McNie public-key encryption core.

Public key (G', F) with F = G' P^-1 H^T S.  Encryption: c1 = mG' + e, c2 = mF.
Decryption: s' = c1 P^-1 H^T - c2 S^-1 = (e P^-1) H^T, LRPC-decode e P^-1,
multiply by P, then solve m G' = c1 - e.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (DecryptionFailure, GenerationError, IntegrityError, ParameterError,
                     ShapeError, StructureError, UnsupportedError)
from .galois import GF2m, field, sample_error, sample_subspace
from .lrpc import LrpcCode, decode, gen_lrpc
from .matrix import (BaseMatrix, ExtMatrix, block_circulant_compress, circulant_expand,
                     invert, random_circulant, random_invertible, random_matrix, rref)
from .params import ParamSet, get_params, validate_params


def param_field(p: ParamSet) -> GF2m:
    return field(p.m, p.modulus)


class PublicKey:

    def __init__(self, params: ParamSet, G: ExtMatrix, F: ExtMatrix):
        self.params = params
        self.G = G
        self.F = F
        self._GF = None
        self._extract = None
        self._lock = threading.Lock()

    @property
    def field(self) -> GF2m:
        return self.G.field

    def GF(self) -> ExtMatrix:
        if self._GF is None:
            self._GF = ExtMatrix.hstack([self.G, self.F])
        return self._GF

    def extractor(self):
        """(information set J, (G'[:, J])^-1), built once."""
        with self._lock:
            if self._extract is None:
                J = _pivot_columns(self.G)
                if len(J) < self.G.shape[0]:
                    raise ShapeError("G' does not have full row rank")
                Gj = ExtMatrix(self.field, self.G.bits[:, J])
                self._extract = (J, invert(Gj))
            return self._extract

    def __eq__(self, other):
        return isinstance(other, PublicKey) and self.params == other.params and \
            self.G == other.G and self.F == other.F

    __hash__ = None


class PrivateKey:

    def __init__(self, params: ParamSet, code: LrpcCode, S: ExtMatrix, P: BaseMatrix):
        self.params = params
        self.code = code
        self.S = S
        self.P = P
        self.P_inv = invert(P)
        self.S_inv = invert(S)
        self.M1 = self.P_inv @ code.H.T          # n x nk
        self._dec = ExtMatrix.vstack([self.M1, self.S_inv])

    @property
    def field(self) -> GF2m:
        return self.code.field

    def __eq__(self, other):
        return isinstance(other, PrivateKey) and self.params == other.params and \
            self.S == other.S and self.P == other.P and self.code.H == other.code.H and \
            self.code.F_basis == other.code.F_basis and \
            bool(np.array_equal(self.code.coeffs, other.code.coeffs))

    __hash__ = None


@dataclass(frozen=True)
class Ciphertext:
    c1: tuple[int, ...]
    c2: tuple[int, ...]


def _pivot_columns(A: ExtMatrix) -> list[int]:
    R, rank, _ = rref(A)
    cols = []
    for i in range(rank):
        cols.append(int(np.flatnonzero(R.bits[i].any(axis=1))[0]))
    return cols


def _systematic_G(fld: GF2m, p: ParamSet, rng) -> ExtMatrix:
    """[I 0 G1; 0 I G2] (qc3) or [I 0 0 G1; 0 I 0 G2; 0 0 I G3] (qc4)."""
    j = p.block
    nb = p.l // j
    Gs = [circulant_expand(random_circulant(j, fld, rng)) for _ in range(nb)]
    left = ExtMatrix.identity(fld, p.l)
    right = ExtMatrix.vstack(Gs)
    return ExtMatrix.hstack([left, right])


def _random_G(fld: GF2m, p: ParamSet, rng) -> ExtMatrix:
    while True:
        G = random_matrix(p.l, p.n, fld, rng)
        if G.rank() == p.l:
            return G


def compute_f(G_prime: ExtMatrix, sk: PrivateKey) -> ExtMatrix:
    """F = G' P^-1 H^T S for an arbitrary G'."""
    return G_prime @ sk.M1 @ sk.S


def keygen(params: ParamSet | str, rng, max_attempts: int = 64) -> tuple[PrivateKey, PublicKey]:
    p = get_params(params)
    chk = validate_params(p)
    if not chk.ok:
        raise ParameterError("; ".join(chk.violations))
    fld = param_field(p)
    nk, j = p.nk, p.block
    for _ in range(max_attempts):
        code = gen_lrpc(p.n, nk, p.d, fld, rng, p.structure)
        if p.variant == "general":
            G = _random_G(fld, p, rng)
            P = random_invertible(p.n, None, rng)
            S0 = random_invertible(nk, fld, rng)
        else:
            G = _systematic_G(fld, p, rng)
            P = random_invertible(p.n, None, rng, block=j)
            # S is a single n/3 circulant for qc3 and 2x2 circulant blocks for qc4
            S0 = random_invertible(nk, fld, rng, block=j)
        if P.is_identity():
            continue
        sk = PrivateKey(p, code, S0, P)
        F0 = compute_f(G, sk)
        if p.variant == "general":
            if F0.rank() < nk:
                continue
            F, S = F0, S0
        else:
            top = F0[:nk, :]
            if top.rank() < nk:
                continue
            T = invert(top)
            F = F0 @ T
            S = S0 @ T
            sk = PrivateKey(p, code, S, P)
        if compute_f(G, sk) != F or F.rank() < nk:
            continue
        pk = PublicKey(p, G, F)
        if p.variant != "general":
            check_public_structure(pk)
        return sk, pk
    raise GenerationError(f"key generation failed after {max_attempts} attempts")


def check_public_structure(pk: PublicKey) -> None:
    """Raise StructureError unless G' and F have the systematic circulant shape."""
    p = pk.params
    fld = pk.field
    j, nk, l = p.block, p.nk, p.l
    G, F = pk.G, pk.F
    if G[:, :l] != ExtMatrix.identity(fld, l):
        raise StructureError("G' is not systematic")
    block_circulant_compress(G[:, l:], j)
    if F[:nk, :] != ExtMatrix.identity(fld, nk):
        raise StructureError("F is not in echelon form")
    block_circulant_compress(F[nk:, :], j)


def _as_msg(fld: GF2m, msg: Sequence[int], length: int) -> list[int]:
    if len(msg) != length:
        raise ShapeError(f"message must have {length} field elements, got {len(msg)}")
    out = [int(x) for x in msg]
    if any(x < 0 or x >> fld.m for x in out):
        raise ShapeError(f"message entries must lie in GF(2^{fld.m})")
    return out


def sample_plain_error(p: ParamSet, fld: GF2m, rng) -> list[int]:
    if p.r == 0:
        return [0] * p.n
    return sample_error(sample_subspace(fld, p.r, rng), p.n, p.r, rng)


def encrypt(pk: PublicKey, msg: Sequence[int], rng=None, error: Sequence[int] | None = None,
            e2: bool = False) -> Ciphertext:
    """c1 = mG' + e, c2 = mF.  ``error`` injects a fixed e (testing hook)."""
    if e2:
        raise UnsupportedError("unsupported: the e2 countermeasure has no specified decryption")
    p, fld = pk.params, pk.field
    m = _as_msg(fld, msg, p.l)
    if error is None:
        if rng is None:
            raise ParameterError("encrypt needs an rng unless an error vector is injected")
        e = sample_plain_error(p, fld, rng)
    else:
        e = _as_msg(fld, error, p.n)
    row = ExtMatrix.from_ints(fld, [m]) @ pk.GF()
    vals = row.row(0)
    c1 = tuple(a ^ b for a, b in zip(vals[:p.n], e))
    return Ciphertext(c1, tuple(vals[p.n:]))


def recover_error(sk: PrivateKey, ct: Ciphertext, variant: str = "K") -> list[int]:
    p, fld = sk.params, sk.field
    c1 = _as_msg(fld, ct.c1, p.n)
    c2 = _as_msg(fld, ct.c2, p.nk)
    s = (ExtMatrix.from_ints(fld, [c1 + c2]) @ sk._dec).row(0)
    out = decode(sk.code, s, p.r, variant)
    if not out.ok:
        raise DecryptionFailure(out.failure)
    return (ExtMatrix.from_ints(fld, [out.error]) @ sk.P).row(0)


def decrypt(sk: PrivateKey, pk: PublicKey, ct: Ciphertext, variant: str = "K") -> list[int]:
    """Raises DecryptionFailure when decoding fails and IntegrityError when
    c1 - e is not a codeword of G'."""
    return decrypt_with_error(sk, pk, ct, variant)[0]


def decrypt_with_error(sk: PrivateKey, pk: PublicKey, ct: Ciphertext, variant: str = "K"):
    """(m, e)."""
    fld = pk.field
    e = recover_error(sk, ct, variant)
    y = [a ^ b for a, b in zip(ct.c1, e)]
    J, Ginv = pk.extractor()
    m = (ExtMatrix.from_ints(fld, [[y[t] for t in J]]) @ Ginv).row(0)
    if (ExtMatrix.from_ints(fld, [m]) @ pk.G).row(0) != y:
        raise IntegrityError("c1 - e is not in the public code")
    return m, e


def public_key_bits(params: ParamSet | str) -> int:
    p = get_params(params)
    if p.variant == "qc3":
        return p.n * p.m
    if p.variant == "qc4":
        return 5 * p.n * p.m // 4
    raise UnsupportedError("general keys are stored as full matrices; no compact size")
