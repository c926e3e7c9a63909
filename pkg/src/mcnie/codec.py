"""Byte formats for keys, ciphertexts and known-answer records.

Every file starts with a 7-byte header: b"MCNI", version, parameter id,
variant id.  Parameter id 0 means a custom set whose fields follow as six
u16 LE values (m, n, l, nk, d, r).

Public payload for QC keys is the first rows of the circulant blocks of G'
and F (qc3: G1, G2, F'; qc4: G1, G2, G3, F', F''), each element m bits,
bit-packed back to back and padded only at the end.  That makes the payload
exactly ceil(n*m/8) bytes (qc3) or ceil(5nm/4/8) bytes (qc4).
"""
from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import FormatError, McNieError
from .galois import field
from .lrpc import LrpcCode
from .matrix import BaseMatrix, ExtMatrix, _circ_index, block_circulant_compress, ints_to_bits
from .params import ID_PARAMS, NAMED, PARAM_IDS, VARIANT_IDS, VARIANTS, ParamSet, get_params, make_params
from .pke import Ciphertext, PrivateKey, PublicKey, param_field

MAGIC = b"MCNI"
VERSION = 1
HEADER_LEN = 7


# -- bit streams --------------------------------------------------------------

class BitWriter:

    def __init__(self):
        self.acc = 0
        self.nbits = 0

    def write(self, value: int, width: int):
        self.acc |= (int(value) & ((1 << width) - 1)) << self.nbits
        self.nbits += width

    def write_many(self, values, width: int):
        for v in values:
            self.write(v, width)

    def getvalue(self) -> bytes:
        return self.acc.to_bytes((self.nbits + 7) // 8, "little")


class BitReader:

    def __init__(self, data: bytes, base_offset: int = 0):
        self.acc = int.from_bytes(data, "little")
        self.total = 8 * len(data)
        self.pos = 0
        self.base = base_offset

    def read(self, width: int) -> int:
        if self.pos + width > self.total:
            raise FormatError("payload truncated", self.base + self.pos // 8)
        v = (self.acc >> self.pos) & ((1 << width) - 1)
        self.pos += width
        return v

    def read_many(self, n: int, width: int) -> list[int]:
        return [self.read(width) for _ in range(n)]

    def finish(self):
        """Remaining bits must be padding: fewer than 8 and all zero."""
        if self.total - self.pos >= 8:
            raise FormatError("trailing bytes after payload", self.base + (self.pos + 7) // 8)
        if self.acc >> self.pos:
            raise FormatError("nonzero padding bits", self.base + self.pos // 8)


# -- header -------------------------------------------------------------------

def encode_header(p: ParamSet) -> bytes:
    pid = PARAM_IDS.get(p.name, 0) if NAMED.get(p.name) == p else 0
    head = MAGIC + bytes([VERSION, pid, VARIANT_IDS[p.variant]])
    if pid == 0:
        head += struct.pack("<6H", p.m, p.n, p.l, p.nk, p.d, p.r)
    return head


def decode_header(data: bytes) -> tuple[ParamSet, int]:
    """(params, offset of the payload)."""
    if len(data) < HEADER_LEN:
        raise FormatError("file shorter than the header", len(data))
    if data[:4] != MAGIC:
        raise FormatError("bad magic", 0)
    if data[4] != VERSION:
        raise FormatError(f"unsupported format version {data[4]}", 4)
    pid, vid = data[5], data[6]
    if vid >= len(VARIANTS):
        raise FormatError(f"unknown variant id {vid}", 6)
    variant = VARIANTS[vid]
    if pid == 0:
        if len(data) < HEADER_LEN + 12:
            raise FormatError("custom parameter block truncated", len(data))
        m, n, l, nk, d, r = struct.unpack_from("<6H", data, HEADER_LEN)
        try:
            p = make_params(n=n, m=m, nk=nk, d=d, r=r, variant=variant, l=l)
        except McNieError as exc:
            raise FormatError(f"invalid custom parameters: {exc}", HEADER_LEN) from None
        return p, HEADER_LEN + 12
    if pid not in ID_PARAMS:
        raise FormatError(f"unknown parameter id {pid}", 5)
    p = NAMED[ID_PARAMS[pid]]
    if p.variant != variant:
        raise FormatError("variant byte does not match the parameter set", 6)
    return p, HEADER_LEN


# -- public key ---------------------------------------------------------------

def _first_rows(A, j):
    return [[c.first_row for c in row] for row in block_circulant_compress(A, j)]


def public_payload(pk: PublicKey) -> bytes:
    p = pk.params
    w = BitWriter()
    if p.variant == "general":
        for row in pk.G.to_ints() + pk.F.to_ints():
            w.write_many(row, p.m)
        return w.getvalue()
    j, l, nk = p.block, p.l, p.nk
    for (fr,) in _first_rows(pk.G[:, l:], j):       # G1, G2 (, G3)
        w.write_many(fr, p.m)
    for fr in _first_rows(pk.F[nk:, :], j)[0]:      # F' (, F'')
        w.write_many(fr, p.m)
    return w.getvalue()


def _circ_ext(fld, first):
    return ExtMatrix(fld, ints_to_bits(list(first), fld.m)[_circ_index(len(first))])


def parse_public_payload(p: ParamSet, payload: bytes, offset: int = 0) -> PublicKey:
    fld = param_field(p)
    rd = BitReader(payload, offset)
    if p.variant == "general":
        G = ExtMatrix.from_ints(fld, [rd.read_many(p.n, p.m) for _ in range(p.l)])
        F = ExtMatrix.from_ints(fld, [rd.read_many(p.nk, p.m) for _ in range(p.l)])
    else:
        j, l, nk = p.block, p.l, p.nk
        Gs = [_circ_ext(fld, rd.read_many(j, p.m)) for _ in range(l // j)]
        Fs = [_circ_ext(fld, rd.read_many(j, p.m)) for _ in range(nk // j)]
        G = ExtMatrix.hstack([ExtMatrix.identity(fld, l), ExtMatrix.vstack(Gs)])
        F = ExtMatrix.vstack([ExtMatrix.identity(fld, nk), ExtMatrix.hstack(Fs)])
    rd.finish()
    return PublicKey(p, G, F)


def serialize_public(pk: PublicKey) -> bytes:
    return encode_header(pk.params) + public_payload(pk)


def deserialize_public(data: bytes) -> PublicKey:
    p, off = decode_header(data)
    return parse_public_payload(p, data[off:], off)


# -- private key --------------------------------------------------------------

def private_payload(sk: PrivateKey) -> bytes:
    p = sk.params
    code = sk.code
    w = BitWriter()
    w.write_many(code.F_basis, p.m)
    if p.variant == "general":
        w.write_many(code.coeffs.reshape(-1).tolist(), 1)
        for row in sk.S.to_ints():
            w.write_many(row, p.m)
        w.write_many(sk.P.bits.reshape(-1).tolist(), 1)
        return w.getvalue()
    j = p.block
    for v in range(p.d):
        Hv = BaseMatrix(code.coeffs[:, :, v])
        for row in _first_rows(Hv, j):
            for fr in row:
                w.write_many(fr, 1)
    for row in _first_rows(sk.S, j):
        for fr in row:
            w.write_many(fr, p.m)
    for row in _first_rows(sk.P, j):
        for fr in row:
            w.write_many(fr, 1)
    return w.getvalue()


def _block_bits(rows_of_first, j):
    idx = _circ_index(j)
    return np.block([[np.asarray(fr, dtype=np.uint8)[idx] for fr in row] for row in rows_of_first])


def parse_private_payload(p: ParamSet, payload: bytes, offset: int = 0) -> PrivateKey:
    fld = param_field(p)
    rd = BitReader(payload, offset)
    Fb = rd.read_many(p.d, p.m)
    if p.variant == "general":
        coeffs = np.array(rd.read_many(p.nk * p.n * p.d, 1), dtype=np.uint8).reshape(p.nk, p.n, p.d)
        S = ExtMatrix.from_ints(fld, [rd.read_many(p.nk, p.m) for _ in range(p.nk)])
        P = BaseMatrix(np.array(rd.read_many(p.n * p.n, 1), dtype=np.uint8).reshape(p.n, p.n))
    else:
        j = p.block
        hb, nb, sb = p.nk // j, p.n // j, p.nk // j
        coeffs = np.zeros((p.nk, p.n, p.d), dtype=np.uint8)
        for v in range(p.d):
            firsts = [[rd.read_many(j, 1) for _ in range(nb)] for _ in range(hb)]
            coeffs[:, :, v] = _block_bits(firsts, j)
        s_first = [[rd.read_many(j, p.m) for _ in range(sb)] for _ in range(sb)]
        S = ExtMatrix.vstack([ExtMatrix.hstack([_circ_ext(fld, fr) for fr in row]) for row in s_first])
        P = BaseMatrix(_block_bits([[rd.read_many(j, 1) for _ in range(nb)] for _ in range(nb)], j))
    rd.finish()
    try:
        code = LrpcCode(fld, Fb, coeffs, p.structure)
        return PrivateKey(p, code, S, P)
    except McNieError as exc:
        raise FormatError(f"private key does not describe a valid key: {exc}", offset) from None


def serialize_private(sk: PrivateKey) -> bytes:
    return encode_header(sk.params) + private_payload(sk)


def deserialize_private(data: bytes) -> PrivateKey:
    p, off = decode_header(data)
    return parse_private_payload(p, data[off:], off)


# -- ciphertexts --------------------------------------------------------------

def ciphertext_payload(p: ParamSet, ct: Ciphertext) -> bytes:
    fld = param_field(p)
    if len(ct.c1) != p.n or len(ct.c2) != p.nk:
        raise FormatError("ciphertext lengths do not match the parameter set")
    return b"".join(fld.to_bytes(x) for x in ct.c1 + ct.c2)


def parse_ciphertext_payload(p: ParamSet, payload: bytes, offset: int = 0) -> Ciphertext:
    nb = (p.m + 7) // 8
    want = (p.n + p.nk) * nb
    if len(payload) != want:
        raise FormatError(f"ciphertext payload is {len(payload)} bytes, expected {want}",
                          offset + min(len(payload), want))
    vals = []
    for i in range(p.n + p.nk):
        v = int.from_bytes(payload[i * nb:(i + 1) * nb], "little")
        if v >> p.m:
            raise FormatError("field element exceeds degree", offset + i * nb)
        vals.append(v)
    return Ciphertext(tuple(vals[:p.n]), tuple(vals[p.n:]))


def serialize_ciphertext(p: ParamSet, ct: Ciphertext) -> bytes:
    return encode_header(p) + ciphertext_payload(p, ct)


def deserialize_ciphertext(data: bytes) -> tuple[ParamSet, Ciphertext]:
    p, off = decode_header(data)
    return p, parse_ciphertext_payload(p, data[off:], off)


def encode_vector(p: ParamSet, v) -> bytes:
    fld = param_field(p)
    return b"".join(fld.to_bytes(int(x)) for x in v)


def decode_vector(p: ParamSet, data: bytes, length: int) -> list[int]:
    nb = (p.m + 7) // 8
    if len(data) != length * nb:
        raise FormatError(f"vector needs {length * nb} bytes, got {len(data)}")
    out = [int.from_bytes(data[i * nb:(i + 1) * nb], "little") for i in range(length)]
    if any(x >> p.m for x in out):
        raise FormatError("field element exceeds degree")
    return out


def public_payload_len(p: ParamSet) -> int:
    if p.variant == "qc3":
        bits = p.n * p.m
    elif p.variant == "qc4":
        bits = 5 * p.n * p.m // 4
    else:
        bits = p.l * (p.n + p.nk) * p.m
    return (bits + 7) // 8


# -- known-answer records -----------------------------------------------------

KAT_FIELDS = ("param", "seed", "pk", "sk", "msg", "ct", "recovered")


def kat_generate(param_name: str, seed: bytes | str) -> dict[str, str]:
    from .pke import decrypt, encrypt, keygen
    from .rng import Drbg
    seed = bytes.fromhex(seed) if isinstance(seed, str) else bytes(seed)
    p = get_params(param_name)
    root = Drbg(seed)
    sk, pk = keygen(p, root.spawn(b"keygen"))
    fld = param_field(p)
    mrng = root.spawn(b"msg")
    msg = [fld.random(mrng) for _ in range(p.l)]
    ct = encrypt(pk, msg, root.spawn(b"encrypt"))
    try:
        rec = encode_vector(p, decrypt(sk, pk, ct)).hex()
    except McNieError as exc:
        rec = f"failure:{exc}"
    return {"param": param_name, "seed": seed.hex(), "pk": serialize_public(pk).hex(),
            "sk": serialize_private(sk).hex(), "msg": encode_vector(p, msg).hex(),
            "ct": serialize_ciphertext(p, ct).hex(), "recovered": rec}


@dataclass
class KatResult:
    ok: bool
    field: str | None = None

    def __bool__(self):
        return self.ok


def kat_verify(record: dict[str, str]) -> KatResult:
    fresh = kat_generate(record["param"], record["seed"])
    for k in KAT_FIELDS:
        if fresh.get(k) != record.get(k):
            return KatResult(False, k)
    return KatResult(True)


def kat_to_text(records: list[dict[str, str]]) -> str:
    out = []
    for rec in records:
        out += [f"{k} = {rec[k]}" for k in KAT_FIELDS]
        out.append("")
    return "\n".join(out)


def kat_from_text(text: str) -> list[dict[str, str]]:
    recs, cur = [], {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            if cur:
                recs.append(cur)
                cur = {}
            continue
        if " = " not in line:
            raise FormatError(f"KAT line {lineno} is not 'key = value'")
        k, v = line.split(" = ", 1)
        cur[k] = v
    if cur:
        recs.append(cur)
    return recs
