import math

import pytest

from mcnie.errors import ParameterError
from mcnie.params import NAMED, make_params
from mcnie.secest import (RsdInstance, alg_complexity, alg_is_polynomial, audit, comb_complexity,
                          rsd_instances)


def test_comb_hand_value():
    # 3 log2 40 + 3 log2 53 + (8*81*53/120 - 53)
    v = comb_complexity(RsdInstance(120, 80, 8, "c1"), 53)
    assert v == pytest.approx(3 * math.log2(40) + 3 * math.log2(53) + 233.2, abs=1e-9)
    assert v == pytest.approx(266.35, abs=0.01)


def test_alg_hand_value():
    v = alg_complexity(RsdInstance(80, 40, 8, "c2"))
    assert v == pytest.approx(9 + 3 * math.log2(40) + 288, abs=1e-9)


def test_polynomial_cases():
    inst = RsdInstance(100, 5, 2, "x")        # (r+1)(k+1) <= n+1
    assert alg_is_polynomial(inst)
    assert alg_complexity(inst) == pytest.approx(3 + 3 * math.log2(5))
    assert alg_complexity(RsdInstance(10, 0, 1, "x")) == 0.0
    with pytest.raises(ParameterError):
        comb_complexity(RsdInstance(10, 10, 1, "x"), 8)


def test_monotone():
    a = comb_complexity(RsdInstance(120, 80, 8, "x"), 53)
    assert comb_complexity(RsdInstance(120, 80, 8, "x"), 54) > a
    assert comb_complexity(RsdInstance(120, 80, 9, "x"), 53) > a


def test_instances_boundary():
    p = make_params(n=30, m=31, nk=10, d=3, r=2, l=11)
    c2 = rsd_instances(p)[1]
    assert c2.triple == (11, 1, 2)
    assert all(i.n_code == 2 * p.n - p.k for i in rsd_instances(p) if i.label == "joint")


def test_audit_report():
    rep = audit(NAMED["qc3-128"], 128)
    assert len(rep.entries) == 8
    assert rep.minimum == min(e.log2 for e in rep.entries)
    assert rep.weakest().label == "c1_reduced"
    kv = dict(line.split(" = ") for line in rep.kv_lines())
    assert kv["include_reduced"] == "true"
    assert "audit of qc3-128" in rep.render()
    pre = audit(NAMED["qc3-128"], 128, include_reduced=False)
    assert len(pre.entries) == 6 and len(pre.excluded) == 2
    assert pre.minimum > rep.minimum


def test_absurd_params_fail():
    rep = audit(make_params(n=10, m=8, nk=1, d=1, r=1, l=9), 128)
    assert not rep.passed and rep.minimum < 128
