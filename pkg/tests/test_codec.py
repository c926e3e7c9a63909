from pathlib import Path

import pytest

from mcnie import codec
from mcnie.errors import FormatError
from mcnie.params import NAMED
from mcnie.pke import decrypt, encrypt, keygen
from mcnie.rng import Drbg

KAT = Path(__file__).parent / "data" / "kat.txt"


def test_header_named_and_custom(small_qc4):
    for p in list(NAMED.values()) + [small_qc4]:
        head = codec.encode_header(p)
        assert head[:4] == b"MCNI"
        got, off = codec.decode_header(head + b"xyz")
        assert got == p
        assert off == len(head)
    assert len(codec.encode_header(NAMED["qc3-128"])) == 7


@pytest.mark.parametrize("bad,offset", [(b"MCN", 3), (b"XXXX\x01\x01\x01", 0),
                                        (b"MCNI\x09\x01\x01", 4), (b"MCNI\x01\x63\x01", 5),
                                        (b"MCNI\x01\x01\x02", 6)])
def test_header_errors(bad, offset):
    with pytest.raises(FormatError) as info:
        codec.decode_header(bad)
    assert info.value.offset == offset


@pytest.mark.parametrize("which", ["qc3_keys", "qc4_keys"])
def test_key_roundtrip(which, request):
    sk, pk = request.getfixturevalue(which)
    pub = codec.serialize_public(pk)
    priv = codec.serialize_private(sk)
    assert codec.deserialize_public(pub) == pk
    assert codec.deserialize_private(priv) == sk
    assert len(pub) - 7 == codec.public_payload_len(pk.params) == pk.params.table_pk_bytes


def test_general_roundtrip(small_general):
    sk, pk = keygen(small_general, Drbg(b"gen-codec"))
    assert codec.deserialize_public(codec.serialize_public(pk)) == pk
    sk2 = codec.deserialize_private(codec.serialize_private(sk))
    assert sk2 == sk
    rng = Drbg(b"m")
    msg = [pk.field.random(rng) for _ in range(small_general.l)]
    assert decrypt(sk2, pk, encrypt(pk, msg, rng)) == msg


def test_ciphertext_roundtrip(qc3_keys):
    sk, pk = qc3_keys
    p = pk.params
    rng = Drbg(b"ctc")
    ct = encrypt(pk, [pk.field.random(rng) for _ in range(p.l)], rng)
    p2, ct2 = codec.deserialize_ciphertext(codec.serialize_ciphertext(p, ct))
    assert p2 == p and ct2 == ct


def test_truncated_and_padded_keys(qc3_keys):
    pub = codec.serialize_public(qc3_keys[1])
    with pytest.raises(FormatError):
        codec.deserialize_public(pub[:-1])
    with pytest.raises(FormatError):
        codec.deserialize_public(pub + b"\0")


def test_vector_codec():
    p = NAMED["qc4-128"]
    v = list(range(p.l))
    assert codec.decode_vector(p, codec.encode_vector(p, v), p.l) == v


def test_kat_replay():
    records = codec.kat_from_text(KAT.read_text())
    assert len(records) == 3
    for rec in records:
        res = codec.kat_verify(rec)
        assert res, f"{rec['param']} seed {rec['seed']}: field {res.field} changed"
        assert rec["recovered"] == rec["msg"]


def test_kat_detects_change():
    rec = codec.kat_from_text(KAT.read_text())[0]
    rec = dict(rec, ct=rec["ct"][:-2] + ("00" if rec["ct"][-2:] != "00" else "01"))
    res = codec.kat_verify(rec)
    assert not res and res.field == "ct"
