import pytest

from expsum_lattice.ff.field import get_field
from expsum_lattice.parser import parse_poly
from expsum_lattice.poly import LaurentPoly

CUBIC = "x1*x2^2 + x2*x3^2 + x1^2*x3"
TRIANGLE = "x1*x2^4 + x1^7*x2^3 + x1^13*x2^2"


def poly(text, p, r=1, torus=False, names=None):
    return parse_poly(text, names, get_field(p, r), torus)


def dwork_yf(n, p, lam=1):
    """y (x_1^n + ... + x_n^n + lam x_1...x_n) with y toric."""
    terms = {}
    for i in range(n):
        v = [0] * (n + 1)
        v[i], v[n] = n, 1
        terms[tuple(v)] = 1
    terms[(1,) * (n + 1)] = lam
    return LaurentPoly.from_terms(terms, get_field(p, 1), torus=[False] * n + [True])


def dwork_form(n, p, lam=1):
    terms = {}
    for i in range(n):
        v = [0] * n
        v[i] = n
        terms[tuple(v)] = 1
    terms[(1,) * n] = lam
    return LaurentPoly.from_terms(terms, get_field(p, 1))


def katz_support_poly(p, d, n):
    """Support {d e_i} and {(d-1) e_i + e_j}: the diagonal simplex with every edge point."""
    terms = {}
    for i in range(n):
        v = [0] * n
        v[i] = d
        terms[tuple(v)] = 1
        for j in range(n):
            if j != i:
                w = [0] * n
                w[i], w[j] = d - 1, 1
                terms[tuple(w)] = 1
    return LaurentPoly.from_terms(terms, get_field(p, 1))


@pytest.fixture
def F2():
    return get_field(2, 1)


@pytest.fixture
def F3():
    return get_field(3, 1)


# -- acceptance summary -----------------------------------------------------------------------

_ACCEPTANCE: dict[str, list] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when != "call" or not item.name.startswith("test_criterion_"):
        return
    number = item.name.split("_")[2]
    doc = (item.function.__doc__ or "").strip().splitlines()[0] if item.function.__doc__ else item.name
    entry = _ACCEPTANCE.setdefault(number, [doc, True, 0.0])
    entry[1] = entry[1] and rep.passed
    entry[2] += rep.duration


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE, key=int):
        doc, ok, secs = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'} ({secs:.2f}s) {doc}")
