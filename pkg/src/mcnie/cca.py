"""CCA2 conversion around the raw PKE.

Encrypt:
    r <- random;  mbar <- Prep(msg)
    y1 <- Gen(r) xor (mbar || Const);  y2 <- r xor Hash(y1)
    (y5 || y4 || y3) <- (y2 || y1)
    e <- Conv(y4);  (c1, c2) <- E(y3, e);  output y5 || c1 || c2
Decrypt runs the same steps backwards and checks Const.

Splits happen at byte granularity.  Every failure raises the same ``Reject``.
"""
from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass
from functools import lru_cache

from .errors import McNieError, ParameterError
from .galois import Subspace, combine, echelon, gaussian_binomial
from .params import ParamSet, get_params
from .pke import Ciphertext, PrivateKey, PublicKey, decrypt_with_error, encrypt, param_field

CONFIG_SHAKE256 = 1
_LEN_PREFIX = 8


class Reject(McNieError):
    """Uniform CCA decryption failure."""

    def __init__(self):
        super().__init__("ciphertext rejected")


# -- Conv: bytes <-> rank-r error vectors ------------------------------------

@lru_cache(maxsize=None)
def _gb(m: int, r: int) -> int:
    return gaussian_binomial(m, r)


def _n_coeff(n: int, r: int) -> int:
    """Number of full-rank r x n matrices over GF(2)."""
    out = 1
    for i in range(r):
        out *= (1 << n) - (1 << i)
    return out


def _deposit(x: int, positions: list[int]) -> int:
    out = 0
    for t, p in enumerate(positions):
        if (x >> t) & 1:
            out |= 1 << p
    return out


def _extract(v: int, positions: list[int]) -> int:
    return sum(((v >> p) & 1) << t for t, p in enumerate(positions))


def unrank_subspace(m: int, r: int, idx: int) -> tuple[int, ...]:
    """Canonical (reduced echelon, top-bit pivot, descending) basis of the idx-th
    r-dim subspace of GF(2)^m.  Subspaces whose top bit is not a pivot come
    first; otherwise the free low part of the top vector is the high digit."""
    if not 0 <= idx < _gb(m, r):
        raise ParameterError("subspace index out of range")
    return _unrank(m, r, idx)


def _unrank(m: int, r: int, idx: int) -> tuple[int, ...]:
    if r == 0:
        return ()
    if r == m:
        return tuple(1 << i for i in reversed(range(m)))
    skip = _gb(m - 1, r)
    if idx < skip:
        return _unrank(m - 1, r, idx)
    f, rest = divmod(idx - skip, _gb(m - 1, r - 1))
    lower = _unrank(m - 1, r - 1, rest)
    piv = {b.bit_length() - 1 for b in lower}
    free = [i for i in range(m - 1) if i not in piv]
    return ((1 << (m - 1)) | _deposit(f, free),) + lower


def rank_subspace(m: int, basis: tuple[int, ...]) -> int:
    """Inverse of unrank_subspace; basis must be canonical."""
    basis = tuple(sorted(basis, reverse=True))
    r = len(basis)
    if r == 0 or r == m:
        return 0
    if basis[0].bit_length() - 1 != m - 1:
        return rank_subspace(m - 1, basis)
    lower = basis[1:]
    piv = {b.bit_length() - 1 for b in lower}
    free = [i for i in range(m - 1) if i not in piv]
    f = _extract(basis[0], free)
    return _gb(m - 1, r) + f * _gb(m - 1, r - 1) + rank_subspace(m - 1, lower)


def _t_outside(v: int, ech: tuple[int, ...], n: int) -> int:
    """Index of v among vectors outside span(ech): (u-1)*2^i + w."""
    i = len(ech)
    piv = [b.bit_length() - 1 for b in ech]
    w = 0
    rho = v
    for t, (b, p) in enumerate(zip(ech, piv)):
        if (v >> p) & 1:
            w |= 1 << t
            rho ^= b
    free = [c for c in range(n) if c not in set(piv)]
    u = _extract(rho, free)
    if u == 0:
        raise ParameterError("row lies in the span of the previous rows")
    return (u - 1) * (1 << i) + w


def _v_outside(t: int, ech: tuple[int, ...], n: int) -> int:
    i = len(ech)
    piv = [b.bit_length() - 1 for b in ech]
    u, w = divmod(t, 1 << i)
    free = [c for c in range(n) if c not in set(piv)]
    v = _deposit(u + 1, free)
    for k, b in enumerate(ech):
        if (w >> k) & 1:
            v ^= b
    return v


def unrank_fullrank(n: int, r: int, idx: int) -> list[int]:
    """idx-th full-rank r x n GF(2) matrix (rows as int bitmasks)."""
    rows: list[int] = []
    ech: tuple[int, ...] = ()
    for i in range(r):
        radix = (1 << n) - (1 << i)
        idx, t = divmod(idx, radix)
        v = _v_outside(t, ech, n)
        rows.append(v)
        ech = echelon(rows)
    if idx:
        raise ParameterError("matrix index out of range")
    return rows


def rank_fullrank(n: int, rows: list[int]) -> int:
    idx = 0
    scale = 1
    ech: tuple[int, ...] = ()
    for i, v in enumerate(rows):
        idx += _t_outside(v, ech, n) * scale
        scale *= (1 << n) - (1 << i)
        ech = echelon(rows[:i + 1])
    return idx


def y4_len(p: ParamSet) -> int:
    r, m, n = p.r, p.m, p.n
    return (r * (r - 1) // 2 + r * (m + n - 2 * r)) // 8


def y3_len(p: ParamSet) -> int:
    return p.l * p.m // 8


def conv(p: ParamSet, data: bytes) -> list[int]:
    """Bytes of length len(y4) -> error vector of rank exactly r."""
    L = y4_len(p)
    if len(data) != L:
        raise ParameterError(f"Conv input must be {L} bytes, got {len(data)}")
    if p.r == 0:
        return [0] * p.n
    X = int.from_bytes(data, "little")
    iE, iC = divmod(X, _n_coeff(p.n, p.r))
    E = unrank_subspace(p.m, p.r, iE)
    C = unrank_fullrank(p.n, p.r, iC)
    return combine(E, C, p.n)


def conv_inv(p: ParamSet, e) -> bytes:
    L = y4_len(p)
    fld = param_field(p)
    e = [int(x) for x in e]
    if len(e) != p.n:
        raise ParameterError(f"error vector must have length {p.n}")
    E = Subspace.span(fld, e).basis
    if len(E) != p.r:
        raise ParameterError(f"error has rank {len(E)}, expected {p.r}")
    if p.r == 0:
        return b""
    piv = [b.bit_length() - 1 for b in E]
    C = [sum(((ej >> pu) & 1) << j for j, ej in enumerate(e)) for pu in piv]
    X = rank_subspace(p.m, E) * _n_coeff(p.n, p.r) + rank_fullrank(p.n, C)
    if X >> (8 * L):
        raise ParameterError("error vector is outside the image of Conv")
    return X.to_bytes(L, "little")


# -- the conversion ----------------------------------------------------------

@dataclass(frozen=True)
class ConversionConfig:
    params: ParamSet
    const: bytes = bytes(16)
    rand_len: int = 32
    config_id: int = CONFIG_SHAKE256

    def __post_init__(self):
        p = self.params
        if self.config_id != CONFIG_SHAKE256:
            raise ParameterError(f"unknown conversion config id {self.config_id}")
        if self.rand_len != 32:
            raise ParameterError("r must be 32 bytes to match the hash output")
        if p.r and (1 << (8 * self.len_y4)) > _gb(p.m, p.r) * _n_coeff(p.n, p.r):
            raise ParameterError("len(y4) exceeds the number of rank-r vectors")

    @property
    def len_y3(self) -> int:
        return y3_len(self.params)

    @property
    def len_y4(self) -> int:
        return y4_len(self.params)

    def hash(self, data: bytes) -> bytes:
        return hashlib.shake_256(b"McNie-H" + data).digest(32)

    def gen(self, seed: bytes, length: int) -> bytes:
        return hashlib.shake_256(b"McNie-G" + seed).digest(length)

    def prep_len(self, msg_len: int) -> int:
        need = self.len_y3 + self.len_y4 - len(self.const) - self.rand_len
        return max(_LEN_PREFIX + msg_len, need)

    def prep(self, msg: bytes) -> bytes:
        out = struct.pack("<Q", len(msg)) + msg
        return out + bytes(self.prep_len(len(msg)) - len(out))

    def unprep(self, mbar: bytes) -> bytes:
        if len(mbar) < _LEN_PREFIX:
            raise Reject()
        (k,) = struct.unpack_from("<Q", mbar)
        if k > len(mbar) - _LEN_PREFIX or any(mbar[_LEN_PREFIX + k:]):
            raise Reject()
        return mbar[_LEN_PREFIX:_LEN_PREFIX + k]

    def len_y5(self, msg_len: int) -> int:
        return self.prep_len(msg_len) + len(self.const) + self.rand_len - self.len_y4 - self.len_y3


def y3_to_msg(p: ParamSet, y3: bytes) -> list[int]:
    x = int.from_bytes(y3, "little")
    mask = (1 << p.m) - 1
    return [(x >> (i * p.m)) & mask for i in range(p.l)]


def msg_to_y3(p: ParamSet, msg: list[int]) -> bytes:
    x = 0
    for i, v in enumerate(msg):
        x |= int(v) << (i * p.m)
    L = y3_len(p)
    if x >> (8 * L):
        raise Reject()
    return x.to_bytes(L, "little")


@dataclass(frozen=True)
class WrappedCiphertext:
    y5: bytes
    core: Ciphertext

    def to_bytes(self, p: ParamSet, config_id: int = CONFIG_SHAKE256) -> bytes:
        fld = param_field(p)
        if len(self.y5) > 0xFFFF:
            raise ParameterError("y5 longer than 65535 bytes")
        body = b"".join(fld.to_bytes(x) for x in self.core.c1 + self.core.c2)
        return bytes([config_id]) + struct.pack(">H", len(self.y5)) + self.y5 + body

    @classmethod
    def from_bytes(cls, p: ParamSet, data: bytes, config_id: int = CONFIG_SHAKE256):
        """Parse; any malformation raises Reject."""
        fld = param_field(p)
        nb = fld.nbytes
        if len(data) < 3 or data[0] != config_id:
            raise Reject()
        (L5,) = struct.unpack_from(">H", data, 1)
        body = data[3 + L5:]
        if len(data) < 3 + L5 or len(body) != (p.n + p.nk) * nb:
            raise Reject()
        vals = []
        for i in range(p.n + p.nk):
            v = int.from_bytes(body[i * nb:(i + 1) * nb], "little")
            if v >> p.m:
                raise Reject()
            vals.append(v)
        return cls(bytes(data[3:3 + L5]), Ciphertext(tuple(vals[:p.n]), tuple(vals[p.n:])))


def _xor(a: bytes, b: bytes) -> bytes:
    return bytes(x ^ y for x, y in zip(a, b))


def cca_encrypt(cfg: ConversionConfig, pk: PublicKey, msg: bytes, rng,
                transcript: dict | None = None) -> WrappedCiphertext:
    p = cfg.params
    r = rng.randbytes(cfg.rand_len)
    mbar = cfg.prep(bytes(msg))
    body = mbar + cfg.const
    y1 = _xor(cfg.gen(r, len(body)), body)
    y2 = _xor(r, cfg.hash(y1))
    Y = y2 + y1
    L5 = len(Y) - cfg.len_y4 - cfg.len_y3
    y5, y4, y3 = Y[:L5], Y[L5:L5 + cfg.len_y4], Y[L5 + cfg.len_y4:]
    e = conv(p, y4)
    core = encrypt(pk, y3_to_msg(p, y3), error=e)
    if transcript is not None:
        transcript.update(r=r, mbar=mbar, y1=y1, y2=y2, y3=y3, y4=y4, y5=y5, e=e)
    return WrappedCiphertext(y5, core)


def cca_decrypt(cfg: ConversionConfig, sk: PrivateKey, pk: PublicKey, wrapped,
                transcript: dict | None = None) -> bytes:
    """Original message bytes, or Reject (whatever went wrong)."""
    p = cfg.params
    try:
        if isinstance(wrapped, (bytes, bytearray)):
            wrapped = WrappedCiphertext.from_bytes(p, bytes(wrapped), cfg.config_id)
        m, e = decrypt_with_error(sk, pk, wrapped.core)
        y3 = msg_to_y3(p, m)
        y4 = conv_inv(p, e)
        Y = wrapped.y5 + y4 + y3
        y2, y1 = Y[:cfg.rand_len], Y[cfg.rand_len:]
        if len(y1) < len(cfg.const) + _LEN_PREFIX:
            raise Reject()
        r = _xor(y2, cfg.hash(y1))
        body = _xor(cfg.gen(r, len(y1)), y1)
        mbar, const = body[:-len(cfg.const)], body[-len(cfg.const):]
        if transcript is not None:
            transcript.update(r=r, mbar=mbar, y1=y1, y2=y2, y3=y3, y4=y4, y5=wrapped.y5, e=e)
        if const != cfg.const:
            raise Reject()
        return cfg.unprep(mbar)
    except Reject:
        raise
    except McNieError:
        raise Reject() from None
