import pytest

from mcnie.errors import ParameterError
from mcnie.galois import field, rank_weight, sample_error, sample_subspace
from mcnie.lrpc import (Failure, check_structure, decode, decoding_matrix, expand_A, expand_K,
                        failure_probability, gen_lrpc, syndrome)
from mcnie.matrix import block_circulant_compress
from mcnie.rng import Drbg


@pytest.fixture(scope="module")
def code():
    return gen_lrpc(30, 15, 2, field(41), Drbg(b"lrpc"))


def test_entries_in_F(code):
    for row in code.H.to_ints():
        for x in row:
            assert x in code.F_space
    assert code.F_space.dim == 2


def test_decode_roundtrip(code):
    rng = Drbg(b"rt")
    fld = code.field
    for r in (1, 2, 3):
        for _ in range(20):
            e = sample_error(sample_subspace(fld, r, rng), code.n, r, rng)
            out = decode(code, syndrome(code, e), r)
            assert out.ok and out.error == e


def test_zero_syndrome(code):
    out = decode(code, [0] * code.nk, 3)
    assert out.ok and out.error == [0] * code.n


def test_support_too_large(code):
    rng = Drbg(b"big")
    e = sample_error(sample_subspace(code.field, 9, rng), code.n, 9, rng)
    out = decode(code, syndrome(code, e), 2)
    assert not out.ok
    assert out.failure in (Failure.SUPPORT_TOO_LARGE, Failure.PRODUCT_SPACE, Failure.INCONSISTENT)


def test_expansion_shapes(code):
    r = 3
    assert expand_A(code, r).shape == (code.nk * code.d * r, code.n * r)
    assert expand_K(code).shape == (code.nk * code.d, code.n)
    # rank A = r * rank K
    assert expand_A(code, r).rank() == r * expand_K(code).rank()


def test_toy_set_has_no_decoding_matrix():
    # nk*d = 16 < n = 24: the K system can never be invertible
    code = gen_lrpc(24, 8, 2, field(11), Drbg(b"toy"))
    assert decoding_matrix(code, 3, "K") is None
    rng = Drbg(b"toy-e")
    e = sample_error(sample_subspace(code.field, 3, rng), 24, 3, rng)
    out = decode(code, syndrome(code, e), 3)
    assert not out.ok


@pytest.mark.parametrize("structure,n,nk,d", [("qc3", 45, 15, 3), ("qc4", 32, 16, 2)])
def test_qc_structure(structure, n, nk, d):
    code = gen_lrpc(n, nk, d, field(37), Drbg(b"qc" + structure.encode()), structure)
    j = n // 3 if structure == "qc3" else n // 4
    block_circulant_compress(code.H, j)
    rng = Drbg(b"qcdec")
    e = sample_error(sample_subspace(code.field, 2, rng), n, 2, rng)
    out = decode(code, syndrome(code, e), 2)
    assert out.ok and out.error == e and rank_weight(out.error) == 2


def test_bad_structure():
    with pytest.raises(ParameterError):
        check_structure(31, 10, "qc3")


def test_failure_probability():
    assert failure_probability(24, 8, 3, 2) == 2.0 ** -3
    assert failure_probability(120, 40, 8, 3) == 2.0 ** -17
    with pytest.raises(ParameterError):
        failure_probability(24, 8, 5, 2)
