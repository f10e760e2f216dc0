import random
from fractions import Fraction

import pytest

from expsum_lattice.ff.cyclotomic import CyclotomicNumber
from expsum_lattice.ff.sums import sum_affine, sum_torus
from expsum_lattice.formulas import torus_degree_bound
from expsum_lattice.lattice import IntegerLattice, prime_to_p_saturation
from expsum_lattice.lfunction import (AmbiguousWeight, LSeries, NewtonPolygon, RationalFn, ReconstructionError,
                                      delta_op, hodge_polygon, l_series, lower_hull, newton_polygon_ordq, pade,
                                      poly_mul, poly_scale_var, polygon_dominates, power_sums,
                                      rational_reconstruct, root_moduli)
from expsum_lattice.polytope import NewtonPolytope, hilbert_numerator

from conftest import poly


def cyc(p, xs):
    return [CyclotomicNumber.rational(p, x) for x in xs]


def as_ints(coeffs):
    out = []
    for c in coeffs:
        assert c.is_rational()
        out.append(c.c[0])
    return out


# -- series ---------------------------------------------------------------------------

def test_series_of_minus_one_sums():
    s = l_series([-1] * 5, 3)
    assert as_ints(s.coefficients) == [1, -1, 0, 0, 0, 0]


def test_series_of_zero_sums():
    assert as_ints(l_series([0] * 4, 2).coefficients) == [1, 0, 0, 0, 0]


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_geometric_series(q):
    s = l_series([q ** (2 * m) for m in range(1, 6)], 2)
    assert as_ints(s.coefficients) == [q ** (2 * i) for i in range(6)]


def test_power_sums_round_trip_random():
    rng = random.Random(3)
    for p in (2, 3, 5):
        for _ in range(20):
            S = [CyclotomicNumber(p, [Fraction(rng.randint(-9, 9)) for _ in range(p - 1)]) for _ in range(6)]
            assert power_sums(l_series(S, p)) == S


def test_inverse_and_power():
    s = l_series([2, 4, 8, 16], 2)  # 1/(1-2t)
    assert as_ints(s.inverse().coefficients) == [1, -2, 0, 0, 0]
    assert s.power(1) is s
    assert s.power(-1) == s.inverse()


# -- reconstruction -----------------------------------------------------------------------

def test_reconstruct_polynomial():
    R = rational_reconstruct(l_series([-1] * 4, 3), 1, 0)
    assert R == RationalFn.from_polys(3, [1, -1])
    assert R.degrees == (1, 0)


def test_reconstruct_geometric_denominator():
    q = 3
    R = rational_reconstruct(l_series([q ** (2 * m) for m in range(1, 5)], 3), 0, 1)
    assert as_ints(R.denominator) == [1, -q**2] and as_ints(R.numerator) == [1]


def test_reconstruct_diagonal_quadric_f2():
    # L(A^2, x^2 + xy + y^2) over F_2 from enumerated sums
    f = poly("x^2 + x*y + y^2", 2)
    S = [sum_affine(f, m) for m in range(1, 5)]
    R = rational_reconstruct(l_series(S, 2), 0, 1)
    assert R.degrees == (0, 1)
    rep = root_moduli(R.denominator, 2)
    assert rep.weights == {2: 1}
    assert abs(rep.moduli[0] - 2) < 1e-12


def test_reconstruct_minimal_pair():
    # (1 - t)(1 - 2t) / (1 - 3t) with loose bounds still gives the exact pair
    p = 5
    R0 = RationalFn.from_polys(p, poly_mul(cyc(p, [1, -1]), cyc(p, [1, -2]), p), [1, -3])
    series = R0.series(9)
    R = rational_reconstruct(series, 4, 3)
    assert R == R0 and R.degrees == (2, 1)


def test_reconstruct_rejects_too_small_bounds():
    p = 5
    R0 = RationalFn.from_polys(p, [1, 1, 1], [1, 2])
    with pytest.raises(ReconstructionError, match="no rational fit"):
        rational_reconstruct(R0.series(8), 1, 1)


def test_reconstruct_needs_room():
    with pytest.raises(ReconstructionError):
        rational_reconstruct(l_series([1, 1], 2), 2, 2)


def test_pade_cyclotomic_coefficients():
    p = 3
    z = CyclotomicNumber.zeta_power(p, 1)
    R0 = RationalFn(p, (CyclotomicNumber.one(p), z), (CyclotomicNumber.one(p), z * z * 3))
    got = pade(R0.series(6), 1, 1)
    assert got == R0


# -- delta ----------------------------------------------------------------------------------

def test_delta_of_linear():
    q = 4
    g = RationalFn.from_polys(2, [1, -1])
    assert delta_op(g, q) == RationalFn.from_polys(2, [1, -1], [1, -q])
    assert delta_op(g, q, 0) == g


@pytest.mark.parametrize("seed", range(5))
def test_delta_squared_expansion(seed):
    rng = random.Random(seed)
    p, q = 3, 9
    P = cyc(p, [1] + [rng.randint(-5, 5) for _ in range(rng.randint(1, 3))])
    g = RationalFn.from_polys(p, P)
    num = poly_mul(P, poly_scale_var(P, q * q), p)
    Pq = poly_scale_var(P, q)
    den = poly_mul(Pq, Pq, p)
    assert delta_op(g, q, 2) == RationalFn.from_polys(p, num, den)


def test_delta_on_power_sums():
    # S_m(P^delta) = (1 - q^m) S_m(P)
    p, q = 2, 2
    P = RationalFn.from_polys(p, [1, 3, -2])
    S = power_sums(P.series(6))
    Sd = power_sums(delta_op(P, q).series(6))
    for m, (a, b) in enumerate(zip(S, Sd), start=1):
        assert b == a * (1 - q**m)


# -- polygons -------------------------------------------------------------------------------------

def test_newton_polygon_examples():
    assert newton_polygon_ordq(cyc(2, [1, -1])).slopes() == [0]
    assert newton_polygon_ordq(cyc(3, [1, -3])).slopes() == [1]
    assert newton_polygon_ordq(cyc(2, [1, -4]), r=2).slopes() == [1]
    NP = newton_polygon_ordq(cyc(3, [1, 1, 9]))
    assert NP.slopes() == [0, 2]
    NP = newton_polygon_ordq(cyc(3, [1, 3, 9]))
    assert NP.vertices == ((0, 0), (2, 2))


def test_hodge_polygon_direct_construction():
    h = hilbert_numerator(NewtonPolytope([(2, 0), (0, 2)]), IntegerLattice.from_generators([(1, 1), (0, 2)]))
    H = hodge_polygon(h)
    # a = (1, 0, 1) with N = 2: slopes 0 and 1
    assert H.slopes() == [0, 1]


def test_polygon_dominance_examples():
    a = lower_hull([(0, Fraction(0)), (1, Fraction(1))])
    b = lower_hull([(0, Fraction(0)), (1, Fraction(0))])
    assert polygon_dominates(a, a)
    assert polygon_dominates(a, b)
    assert not polygon_dominates(b, a)
    assert a.at(1) == 1 and a.length == 1


def test_root_moduli_examples():
    q = 3
    assert root_moduli(cyc(3, [1, -q]), q).weights == {2: 1}
    P = poly_mul(cyc(3, [1, -1]), cyc(3, [1, -q]), 3)
    rep = root_moduli(P, q)
    assert rep.weights == {0: 1, 2: 1}
    assert max(rep.residuals) < 1e-6


def test_root_moduli_ambiguous():
    with pytest.raises(AmbiguousWeight):
        root_moduli(cyc(2, [1, -3]), 2)  # |rho| = 3 is not a half-integer power of 2
    with pytest.raises(ValueError):
        root_moduli(cyc(2, [1]), 2)


# -- end-to-end on nondegenerate torus examples ------------------------------------------------

TORUS_FIXTURES = [("x1 + x2 + x1^-1*x2^-1", 2), ("x1 + x2 + x1^-1*x2^-1", 3), ("x + x^-1", 2), ("x + x^-1", 3)]


def torus_P(text, p, extra=2):
    f = poly(text, p, torus=True)
    D = torus_degree_bound(f)
    S = [sum_torus(f, m) for m in range(1, D + extra + 1)]
    sign = -1 if (f.nvars - 1) % 2 else 1
    P = rational_reconstruct(l_series([s * sign for s in S], p), D, 0)
    return f, P, S


@pytest.mark.parametrize("text,p", TORUS_FIXTURES)
def test_newton_above_hodge(text, p):
    f, P, _ = torus_P(text, p)
    assert P.degrees[1] == 0
    h = hilbert_numerator(NewtonPolytope(f.support), prime_to_p_saturation(f.support, p)[0])
    assert P.degrees[0] == h.total
    NP = newton_polygon_ordq(P.numerator)
    HP = hodge_polygon(h)
    assert NP.vertices[-1][0] == HP.vertices[-1][0]
    assert polygon_dominates(NP, HP)
    # pure of weight n: total rise = D * n / 2
    rep = root_moduli(P.numerator, p)
    assert rep.weights == {f.nvars: P.degrees[0]}
    assert NP.vertices[-1][1] == Fraction(P.degrees[0] * f.nvars, 2)


@pytest.mark.parametrize("text,p", TORUS_FIXTURES)
def test_torus_degree_bound_holds(text, p):
    f, P, _ = torus_P(text, p)
    assert 0 <= sum(max(d, 0) for d in P.degrees) <= torus_degree_bound(f)


def test_delta_consistency_with_extra_variable():
    # f in T^2 viewed in T^3: L(T^3, f)^{+1} = P^delta with P from T^2
    p, q = 3, 3
    _, P, _ = torus_P("x1 + x2 + x1^-1*x2^-1", p)
    f3 = poly("x1 + x2 + x1^-1*x2^-1", p, torus=True, names=["x1", "x2", "x3"])
    assert f3.nvars == 3
    S3 = [sum_torus(f3, m) for m in range(1, 5)]
    L3 = l_series(S3, p)  # sign for n = 3 is +1
    assert L3.coefficients == delta_op(P, q).series(4).coefficients
