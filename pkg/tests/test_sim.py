import pytest

from mcnie.errors import ParameterError
from mcnie.params import make_params
from mcnie.plotting import audit_figure, failure_rate_figure
from mcnie.secest import audit
from mcnie.sim import simulate


@pytest.fixture(scope="module")
def exp5():
    return make_params(n=16, m=41, nk=8, d=2, r=2)


def test_decoder_mode_counts(exp5):
    res = simulate(exp5, 400, seed=b"s", mode="decoder")
    assert res.trials == 400
    assert res.failures == sum(res.reasons.values())
    assert res.predicted == 2.0 ** -5
    lo, hi = res.ci
    assert lo <= res.rate <= hi


def test_deterministic_and_worker_independent(exp5):
    a = simulate(exp5, 120, seed=b"w", mode="decoder", rekey=50)
    b = simulate(exp5, 120, seed=b"w", mode="decoder", rekey=50, workers=2)
    assert (a.failures, a.reasons) == (b.failures, b.reasons)


def test_pke_mode(small_qc4):
    res = simulate(small_qc4, 30, seed=b"p", rekey=15)
    assert res.failures == 0


def test_r_zero_never_fails(exp5):
    assert simulate(exp5, 50, seed=b"z", mode="decoder", r=0).failures == 0


def test_bad_arguments(exp5):
    with pytest.raises(ParameterError):
        simulate(exp5, 0)
    with pytest.raises(ParameterError):
        simulate(exp5, 10, mode="bogus")


def test_figures(tmp_path, exp5):
    res = simulate(exp5, 100, seed=b"f", mode="decoder")
    out = failure_rate_figure([res], tmp_path / "rate.png")
    assert out.read_bytes()[:4] == b"\x89PNG"
    out = audit_figure(audit("qc4-128", 128), tmp_path / "sub" / "audit.png")
    assert out.stat().st_size > 1000
