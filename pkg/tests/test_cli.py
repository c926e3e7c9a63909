import pytest

from mcnie.cli import main
from mcnie.params import NAMED

TOY = "custom:n=28,m=31,nk=14,d=2,r=2,l=20"


@pytest.fixture
def keys(tmp_path):
    pub, priv = tmp_path / "k.pub", tmp_path / "k.priv"
    assert main(["keygen", "--param", "qc3-128", "--seed", "01", "--out-pub", str(pub),
                 "--out-priv", str(priv)]) == 0
    return pub, priv


def test_keygen_deterministic(tmp_path, keys, capsys):
    pub, _ = keys
    other = tmp_path / "again.pub"
    main(["keygen", "--param", "qc3-128", "--seed", "01", "--out-pub", str(other),
          "--out-priv", str(tmp_path / "again.priv")])
    assert other.read_bytes() == pub.read_bytes()
    assert "public key: 795 bytes" in capsys.readouterr().out


def test_raw_roundtrip(tmp_path, keys):
    pub, priv = keys
    p = NAMED["qc3-128"]
    msg = bytes(range(7)) * p.l  # 7 bytes per GF(2^53) element
    src, ct, back = tmp_path / "m", tmp_path / "c", tmp_path / "b"
    src.write_bytes(msg)
    assert main(["encrypt", "--pub", str(pub), "--in", str(src), "--out", str(ct), "--seed", "02"]) == 0
    assert main(["decrypt", "--priv", str(priv), "--pub", str(pub), "--in", str(ct),
                 "--out", str(back)]) == 0
    assert back.read_bytes() == msg


def test_cca_roundtrip_and_tamper(tmp_path, keys):
    pub, priv = keys
    src, ct, back = tmp_path / "m", tmp_path / "c", tmp_path / "b"
    src.write_bytes(b"any length at all, even odd ones.")
    assert main(["cca-encrypt", "--pub", str(pub), "--in", str(src), "--out", str(ct)]) == 0
    assert main(["cca-decrypt", "--priv", str(priv), "--pub", str(pub), "--in", str(ct),
                 "--out", str(back)]) == 0
    assert back.read_bytes() == src.read_bytes()
    data = bytearray(ct.read_bytes())
    data[40] ^= 4
    ct.write_bytes(bytes(data))
    assert main(["cca-decrypt", "--priv", str(priv), "--pub", str(pub), "--in", str(ct),
                 "--out", str(back)]) == 1


def test_exit_codes(tmp_path, keys, capsys):
    pub, priv = keys
    assert main(["keygen", "--param", "nope", "--out-pub", "a", "--out-priv", "b"]) == 2
    assert main(["encrypt", "--pub", str(tmp_path / "missing"), "--in", "x", "--out", "y"]) == 3
    bad = tmp_path / "bad"
    bad.write_bytes(b"12345")   # not a whole field element
    assert main(["encrypt", "--pub", str(pub), "--in", str(bad), "--out", "y"]) == 2
    src = tmp_path / "m"
    src.write_bytes(bytes(7))
    assert main(["encrypt", "--pub", str(pub), "--in", str(src), "--out",
                 str(tmp_path / "no" / "dir" / "y")]) == 3
    assert main(["encrypt", "--pub", str(pub), "--in", str(src), "--out", str(tmp_path / "c"),
                 "--e2"]) == 2
    assert "unsupported" in capsys.readouterr().err


def test_audit_report(tmp_path, capsys):
    fig = tmp_path / "audit.png"
    code = main(["audit", "--param", "qc3-128", "--figure", str(fig)])
    out = capsys.readouterr().out
    assert "----- BEGIN AUDIT REPORT -----" in out and "----- END AUDIT REPORT -----" in out
    assert "c1_reduced.comb" in out and fig.exists()
    assert code == 0
    assert main(["audit", "--param", "custom:n=10,m=8,nk=1,d=1,r=1,l=9", "--format", "text"]) == 1


def test_simulate_report(tmp_path, capsys):
    fig = tmp_path / "sim.png"
    assert main(["simulate", "--param", TOY, "--trials", "40", "--seed", "00", "--mode", "decoder",
                 "--figure", str(fig)]) == 0
    out = capsys.readouterr().out
    body = out.split("----- BEGIN SIMULATION REPORT -----")[1].split("----- END SIMULATION REPORT -----")[0]
    kv = dict(line.split(" = ") for line in body.strip().splitlines())
    assert kv["trials"] == "40" and kv["predicted_exponent"] == "-11"
    assert fig.exists()


def test_params_table(capsys):
    assert main(["params"]) == 0
    out = capsys.readouterr().out
    for name in NAMED:
        assert name in out
