import random
from fractions import Fraction

import pytest
from sympy import Matrix

from expsum_lattice.ff.field import get_field
from expsum_lattice.ff.sums import count_points, count_zeros, exp_sum
from expsum_lattice.formulas import (FormulaError, cw_divisibility, dwork_degree, katz_degree, l_degree_bounds,
                                     nu, nu_value, origin_faces_are_restrictions, restricted_lattices_agree,
                                     top_weight_count, torus_degree_bound)
from expsum_lattice.lfunction import l_series, rational_reconstruct
from expsum_lattice.poly import LaurentPoly

from conftest import CUBIC, dwork_yf, katz_support_poly, poly


def test_torus_bound_linear():
    assert torus_degree_bound(poly("x", 3, torus=True)) == 1


@pytest.mark.parametrize("p,k,e,n", [(2, 1, 1, 2), (2, 1, 3, 2), (3, 1, 2, 2), (2, 2, 1, 3)])
def test_torus_bound_diagonal_simplex(p, k, e, n):
    d = p**k * e
    f = katz_support_poly(p, d, n)
    assert torus_degree_bound(f) == d**n // p**k


def test_torus_bound_cubic_from_determinant():
    J = [(1, 2, 0), (0, 1, 2), (2, 0, 1)]
    vol = abs(Matrix(J).det())  # 3! V of the simplex with the origin
    assert vol == 9
    # [Z^3 : Z<J>] = 9; at p = 3 the whole index is a p-power so M_J = Z<J>, else M_J = Z^3
    assert torus_degree_bound(poly(CUBIC, 3)) == vol // 9
    for p in (2, 5, 7):
        assert torus_degree_bound(poly(CUBIC, p)) == vol


def test_nu_linear():
    assert nu_value(poly("x", 3, torus=True)) == 1
    # affine: 1! V - 0! V(point) = 0, and indeed L(A^1, x) = 1
    assert nu_value(poly("x", 3)) == 0


def test_nu_not_convenient_is_tagged():
    pred = nu(poly("x1*x2", 2))
    assert pred.notes and "not convenient" in pred.notes[0]
    assert not nu(poly("x1^2 + x2^2", 3)).notes


@pytest.mark.parametrize("p,d,n", [(2, 2, 2), (2, 4, 2), (3, 3, 2), (3, 6, 2), (2, 2, 3), (2, 6, 2), (5, 5, 2)])
def test_nu_equals_katz_closed_form(p, d, n):
    k = 0
    while d % p ** (k + 1) == 0:
        k += 1
    f = katz_support_poly(p, d, n)
    assert nu_value(f) == katz_degree(p, k, d // p**k, n)


@pytest.mark.parametrize("p,n", [(2, 2), (3, 3), (2, 4), (2, 6), (3, 6)])
def test_nu_equals_dwork_closed_form(p, n):
    k, e = 0, n
    while e % p == 0:
        e //= p
        k += 1
    assert nu_value(dwork_yf(n, p)) == dwork_degree(p, k, e, n)


def test_closed_form_examples():
    assert katz_degree(2, 1, 1, 2) == 1
    assert dwork_degree(2, 2, 1, 4) == 3
    for p, k in ((2, 1), (2, 3), (3, 1), (3, 2), (5, 1)):
        assert dwork_degree(p, k, 1, p**k) == p**k - 1
    with pytest.raises(FormulaError):
        katz_degree(3, 1, 3, 2)
    with pytest.raises(FormulaError):
        dwork_degree(2, 0, 1, 2)


def test_cw_cubic():
    pred = cw_divisibility([poly(CUBIC, 3)])
    assert pred["mu"].value == 1
    for p in (2, 5):
        assert cw_divisibility([poly(CUBIC, p)])["mu"].value == 0


@pytest.mark.parametrize("p,ks", [(2, (1, 2)), (3, (1, 1)), (2, (1, 1, 1)), (3, (2, 1))])
def test_cw_p_power_diagonal_is_exact(p, ks):
    n = len(ks)
    text = " + ".join(f"x{i + 1}^{p**k}" for i, k in enumerate(ks))
    f = poly(text, p)
    assert cw_divisibility([f])["mu"].value == n - 1
    # the zero set is a hyperplane after x -> x^{p^k}: exactly q^{n-1} points
    for m in (1, 2):
        assert count_points(f, m) == p ** (m * (n - 1))


def test_cw_system_bound_holds():
    F = get_field(3, 1)
    f1 = LaurentPoly.from_terms({(3, 0, 0): 1, (0, 3, 0): 1, (0, 0, 3): 1}, F)
    f2 = LaurentPoly.from_terms({(1, 1, 1): 1, (3, 0, 0): 2}, F)
    bound = cw_divisibility([f1, f2])["omega"].value
    assert bound is not None
    for m in (1, 2):
        N = count_zeros([f1, f2], m)
        assert N > 0
        v = 0
        while N % 3 ** (v + 1) == 0:
            v += 1
        assert Fraction(v, m) >= bound  # ord_q N with q = 3^m


def test_top_weight_linear():
    # L(T^1, x) = 1 - t and L(A^1, x) = 1: neither has a root of weight 1
    assert top_weight_count(poly("x", 3, torus=True)).value == 0
    assert top_weight_count(poly("x", 3)).value == 0


@pytest.mark.parametrize("f", [katz_support_poly(2, 4, 2), katz_support_poly(3, 3, 2), dwork_yf(4, 2),
                               dwork_yf(3, 3), poly("x1^2 + x1*x2 + x2^2", 2)])
def test_top_weight_equals_nu_when_faces_are_restrictions(f):
    assert origin_faces_are_restrictions(f)
    assert restricted_lattices_agree(f)
    assert top_weight_count(f).value == nu_value(f)


def test_origin_face_not_a_restriction_detected():
    f = poly("x1*x2 + x1^2*x2 + x1*x2^2", 5)
    assert not origin_faces_are_restrictions(f)


# -- reconstruction bounds: every actual L-function fits inside them ---------------------------

def _measured_degrees(f, order):
    S = [exp_sum(f, m).value for m in range(1, order + 1)]
    sign = -1 if (f.nvars - 1) % 2 else 1
    R = rational_reconstruct(l_series([s * sign for s in S], f.p), *l_degree_bounds(f))
    return R.degrees


def _bound_cases(count, limit=4 * 10**6):
    rng = random.Random(2024)
    out = []
    while len(out) < count:
        p = rng.choice([2, 3])
        F = get_field(p, 1)
        n = rng.choice([1, 2])
        torus = [rng.random() < 0.5 for _ in range(n)]
        terms = {}
        for _ in range(rng.randint(1, 3)):
            j = tuple(rng.randint(-1 if torus[i] else 0, 2) for i in range(n))
            terms[j] = rng.randrange(1, p)
        f = LaurentPoly.from_terms(terms, F, torus=torus)
        dn, dd = l_degree_bounds(f)
        if (F.order ** (dn + dd + 2)) ** n <= limit:
            out.append(f)
    return out


@pytest.mark.parametrize("f", _bound_cases(10), ids=str)
def test_l_degree_bounds_admit_the_measured_function(f):
    dn, dd = l_degree_bounds(f)
    got = _measured_degrees(f, dn + dd + 2)
    assert got[0] <= dn and got[1] <= dd


def test_l_degree_bounds_examples():
    assert l_degree_bounds(poly("x", 3)) == (1, 1)
    assert l_degree_bounds(poly("x", 3, torus=True)) == (1, 0)
    # the affine line: L(A^1, x) = 1 sits inside (1, 1)
    assert _measured_degrees(poly("x", 3), 4) == (0, 0)
