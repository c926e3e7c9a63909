import pytest

from mcnie.params import make_params
from mcnie.pke import keygen
from mcnie.rng import Drbg

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def qc3_keys():
    return keygen("qc3-128", Drbg(b"fixture-qc3"))


@pytest.fixture(scope="session")
def qc4_keys():
    return keygen("qc4-128", Drbg(b"fixture-qc4"))


@pytest.fixture(scope="session")
def small_general():
    # n = nk*d so the K system is square; failure exponent nk+1-rd = 11
    return make_params(n=28, m=31, nk=14, d=2, r=2, l=20, variant="general")


@pytest.fixture(scope="session")
def small_qc3():
    return make_params(n=45, m=37, nk=15, d=3, r=2, variant="qc3")


@pytest.fixture(scope="session")
def small_qc4():
    return make_params(n=32, m=37, nk=16, d=2, r=3, variant="qc4")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
