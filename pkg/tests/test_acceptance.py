"""Acceptance criteria, one test per criterion, each with its time limit.

A one-line PASS/FAIL summary per criterion is printed at the end of the run
(see ``pytest_terminal_summary`` in conftest.py).
"""

import time
from fractions import Fraction

import pytest

from expsum_lattice.ff.cyclotomic import ord_zeta
from expsum_lattice.ff.sums import count_points, sum_affine
from expsum_lattice.formulas import dwork_degree, katz_degree, nu_value
from expsum_lattice.lattice import index_of, prime_to_p_saturation, span_lattice
from expsum_lattice.lfunction import RationalFn, l_series, rational_reconstruct, root_moduli
from expsum_lattice.nondegeneracy import Status, build_face_systems, is_nondegenerate, nondeg_via_reduction, _verify
from expsum_lattice.lattice import IntegerLattice
from expsum_lattice.pipeline import projective_counts, sign, zeta_R
from expsum_lattice.polytope import mu, omega

from conftest import CUBIC, TRIANGLE, dwork_form, dwork_yf, poly


class Clock:
    def __init__(self, limit):
        self.limit = limit

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0
        if exc[0] is None:
            assert self.elapsed < self.limit, f"took {self.elapsed:.2f}s, limit {self.limit}s"


def test_criterion_1_cubic_mu_and_counts():
    """Cubic: mu = 2 at p=3 with q | N over F_3 and F_9; mu = 1 at p=5."""
    with Clock(1.0):
        f3 = poly(CUBIC, 3)
        assert mu(f3.support, p=3) == 2
        for m in (1, 2):
            q = 3**m
            N = count_points(f3, m)
            assert N % q == 0, (m, N)
        assert mu(poly(CUBIC, 5).support, p=5) == 1


def test_criterion_2_p_power_diagonal():
    """x1^2 + x2^4 over F_2 and F_4: mu = 2 and N = q exactly."""
    with Clock(1.0):
        J = [(2, 0), (0, 4)]
        assert mu(J, p=2) == 2
        for r in (1, 2):
            f = poly("x1^2 + x2^4", 2, r)
            assert count_points(f) == 2**r


def test_criterion_3_triangle_omega():
    """omega = 7/25 at p=7, 1 at p=5; ord_q S_1 >= omega at q=5."""
    with Clock(1.0):
        f7, f5 = poly(TRIANGLE, 7), poly(TRIANGLE, 5)
        assert omega(f7.support, p=7) == Fraction(7, 25)
        w5 = omega(f5.support, p=5)
        assert w5 == 1
        S = sum_affine(f5)
        assert ord_zeta(S, 1)[2] >= w5


@pytest.mark.parametrize("p", [2, 3])
def test_criterion_4_remark_example(p):
    """L(A^3, (z^p - z) + x^{p-1} y + y^{p-1} z) = 1/(1 - q^2 t) from S_1..S_4."""
    with Clock(10.0):
        f = poly(f"z^{p} - z + x^{p - 1}*y + y^{p - 1}*z", p)
        S = [sum_affine(f, m) for m in range(1, 5)]
        assert sign(3) == 1
        L = rational_reconstruct(l_series(S, p), 0, 1)
        assert L == RationalFn.from_polys(p, [1], [1, -(p**2)])


def test_criterion_5_quadric_f2():
    """x^2 + xy + y^2 over F_2: L^{-1} has degree nu = 1 and |root| = 2."""
    with Clock(5.0):
        f = poly("x^2 + x*y + y^2", 2)
        S = [sum_affine(f, m) for m in range(1, 5)]
        nu = nu_value(f)
        assert nu == katz_degree(2, 1, 1, 2) == 1
        L_signed = rational_reconstruct(l_series([s * sign(2) for s in S], 2), nu, 0)
        assert L_signed.degrees == (1, 0)
        # so L itself is the reciprocal of a degree-1 polynomial
        L = rational_reconstruct(l_series(S, 2), 0, 1)
        assert L.degrees == (0, 1) and L.reciprocal() == L_signed
        rep = root_moduli(L_signed.numerator, 2, tolerance=1e-3)
        assert rep.weights == {2: 1}
        assert abs(rep.moduli[0] - 2) / 2 < 1e-3


def test_criterion_6_dwork_family():
    """n=4, p=2, lambda=1: R(t) of degree 3 with all |roots| = 2; [sat : M_J] = (p^k)^(n-2)."""
    with Clock(60.0):
        n, p, pk = 4, 2, 4
        f = dwork_form(n, p, lam=1)
        counts = projective_counts(f, 6)
        deg = dwork_degree(2, 2, 1, n)
        assert deg == 3 == nu_value(dwork_yf(n, p))
        fit = zeta_R(counts, 2, n, p, (deg, 0))
        assert fit.rational is not None and fit.rational.degrees == (3, 0)
        rep = root_moduli(fit.rational.numerator, 2, tolerance=1e-3)
        assert rep.weights == {n - 2: 3}
        assert all(abs(m - 2) / 2 < 1e-3 for m in rep.moduli)
        assert max(rep.residuals) < 1e-6
        J = dwork_yf(n, p).support
        idx = index_of(prime_to_p_saturation(J, p)[0], span_lattice(J)[1])
        # (p^k)^(n-2) = 4^2 = 16; the criterion's literal "= 4" does not match its own formula
        assert idx == pk ** (n - 2) == 16


def test_criterion_7_nondegeneracy_fixtures():
    """Dwork yf is nondegenerate up to degree 3; x1 + x1 x2^p is degenerate with a verified witness."""
    with Clock(30.0):
        for n, p in ((4, 2), (3, 3)):
            f = dwork_yf(n, p)
            MJ = prime_to_p_saturation(f.support, p)[0]
            d, r = is_nondegenerate(f, MJ, 3), nondeg_via_reduction(f, MJ, 3)
            assert d.status is Status.NONDEGENERATE_UP_TO_DEGREE and d.witness is None and d.searched_bound == 3
            assert r.status is d.status
        for p in (2, 3):
            g = poly(f"x1 + x1*x2^{p}", p)
            Z2 = IntegerLattice.standard(2)
            d, r = is_nondegenerate(g, Z2, 3), nondeg_via_reduction(g, Z2, 3)
            assert d.status is Status.DEGENERATE and r.status is Status.DEGENERATE
            for v in (d, r):
                w = v.witness
                sysm = [s for s in build_face_systems(g, Z2) if set(s.points) == set(w.face_points)]
                assert _verify(sysm[0].polynomials, w.field, w.point)


def test_criterion_8_property_suites():
    """Every property suite at >= 1000 seeded cases, within the suite's share of the 5 minute budget."""
    import test_properties as tp

    with Clock(240.0):
        for name in ("test_lattice_sandwich_and_index_split", "test_p_power_reduction_sum_invariance",
                     "test_hilbert_total_is_normalized_volume", "test_exp_log_round_trip", "test_delta_algebra",
                     "test_valuation_axioms", "test_katz_grid", "test_dwork_grid"):
            getattr(tp, name)()
        assert tp.CASES >= 1000
        for text, p in tp.TORUS_FIXTURES:
            tp.test_torus_degree_bound_on_fixtures(text, p)
        dominance = [("x1 + x2 + x1^-1*x2^-1", 2), ("x1 + x2 + x1^-1*x2^-1", 3), ("x + x^-1", 5)]
        for text, p in dominance:
            tp.test_newton_over_hodge_on_fixtures(text, p)
        assert len(dominance) >= 2
