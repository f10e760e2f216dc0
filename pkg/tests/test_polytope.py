import itertools
import random
from fractions import Fraction
from math import comb, factorial

import numpy as np
import pytest
from scipy.spatial import ConvexHull

from expsum_lattice.lattice import IntegerLattice, prime_to_p_saturation, span_lattice
from expsum_lattice.polytope import (NewtonPolytope, PolytopeError, SearchInconclusive, convenient,
                                     faces_containing_origin, faces_excluding_origin, hilbert_numerator, mu,
                                     normalized_volume, omega, poly_dim, restrict)

from conftest import CUBIC, TRIANGLE, dwork_yf, katz_support_poly, poly

TRI_J = [(1, 4), (7, 3), (13, 2)]


def hull_oracle(points):
    pts = np.array(sorted(set(map(tuple, points)) | {(0,) * len(points[0])}), dtype=float)
    h = ConvexHull(pts)
    return {tuple(int(x) for x in pts[i]) for i in h.vertices}, h


def brute_count(points, t, lattice_pred=lambda u: True):
    """Lattice points of t*conv(points u 0) via the float hull equations (full-dimensional only)."""
    _, h = hull_oracle(points)
    n = len(points[0])
    hi = [t * max(max(p[i] for p in points), 0) for i in range(n)]
    lo = [t * min(min(p[i] for p in points), 0) for i in range(n)]
    cnt = 0
    for u in itertools.product(*[range(lo[i], hi[i] + 1) for i in range(n)]):
        x = np.array(u, dtype=float)
        if all(eq[:-1] @ x + t * eq[-1] <= 1e-9 for eq in h.equations) and lattice_pred(u):
            cnt += 1
    return cnt


def test_diagonal_simplex_vertices():
    d, n = 4, 3
    J = [tuple(d * int(i == j) for j in range(n)) for i in range(n)]
    P = NewtonPolytope(J)
    assert sorted(P.vertices) == sorted(J + [(0, 0, 0)])
    assert P.dim == 3


def test_triangle_example_is_a_triangle():
    P = NewtonPolytope(TRI_J)
    oracle, _ = hull_oracle(TRI_J)
    assert set(P.vertices) == oracle == {(0, 0), (1, 4), (13, 2)}
    # (7, 3) lies on the edge from (1, 4) to (13, 2)
    edge = [f for f in P.faces if f.dim == 1 and not f.contains_origin]
    assert len(edge) == 1
    assert sorted(P.face_points(edge[0])) == [(1, 4), (7, 3), (13, 2)]


def test_single_point():
    P = NewtonPolytope([(0, 0)])
    assert P.dim == 0 and P.vertices == [(0, 0)]
    assert faces_excluding_origin(P) == []


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_standard_simplex_faces(n):
    J = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    P = NewtonPolytope(J)
    faces = faces_excluding_origin(P)
    assert len(faces) == 2**n - 1
    assert {frozenset(f.points(P)) for f in faces} == {
        frozenset(s) for r in range(1, n + 1) for s in itertools.combinations(J, r)}
    assert len(faces_containing_origin(P)) == 2**n


def test_dwork_faces_are_restrictions():
    n = 4
    f = dwork_yf(n, 2)
    P = NewtonPolytope(f.support)
    got = {frozenset(P.face_points(face)) for face in faces_excluding_origin(P)}
    expect = set()
    for r in range(n):
        for A in itertools.combinations(range(n), r):
            keep = [i for i in range(n) if i not in A]
            pts = [tuple(n * int(t == i) for t in range(n)) + (1,) for i in keep]
            if not A:
                pts.append((1,) * (n + 1))
            expect.add(frozenset(pts))
    assert got == expect


def test_segment():
    P = NewtonPolytope([(2, 3)])
    faces = faces_excluding_origin(P)
    assert len(faces) == 1 and faces[0].points(P) == [(2, 3)]


def test_weights():
    P = NewtonPolytope(TRI_J)
    assert P.weight((0, 0)) == 0
    for v in P.vertices:
        if any(v):
            assert P.weight(v) == 1
    assert P.weight((1, 1)) == Fraction(7, 25)
    assert P.weight_denominator == 25
    with pytest.raises(PolytopeError):
        P.weight((1, 0))  # outside the cone


def test_weight_by_lp_oracle():
    # w(u) = min{ t : u in t*Delta }: bisect with the float hull
    P = NewtonPolytope(TRI_J)
    _, h = hull_oracle(TRI_J)
    for u in [(1, 1), (2, 3), (5, 2), (3, 5), (13, 2), (20, 5)]:
        w = P.weight(u)
        x = np.array(u, dtype=float)
        lo = max((eq[:-1] @ x) / -eq[-1] for eq in h.equations if eq[-1] < -1e-12)
        assert abs(float(w) - lo) < 1e-9


def test_volume_examples():
    assert normalized_volume(NewtonPolytope([(1, 0), (0, 1)]), IntegerLattice.standard(2)) == 1
    for n in (2, 3, 4):
        f = dwork_yf(n, 2)
        P = NewtonPolytope(f.support)
        sat = span_lattice(f.support)[1]
        assert normalized_volume(P, sat) == n ** (n - 1)
    p, k, e, n = 3, 1, 2, 3
    d = p**k * e
    J = [tuple(d * int(i == j) for j in range(n)) for i in range(n)]
    B = [(p**k, 0, 0), (-1, 1, 0), (-1, 0, 1)]
    M = IntegerLattice.from_generators(B)
    assert normalized_volume(NewtonPolytope(J), M) == Fraction(d**n, p**k)


def test_volume_matches_hull_oracle():
    rng = random.Random(7)
    for _ in range(30):
        n = rng.choice([2, 3])
        J = [tuple(rng.randint(0, 5) for _ in range(n)) for _ in range(rng.randint(n, n + 3))]
        P = NewtonPolytope(J)
        if P.dim < n:
            continue
        _, h = hull_oracle(J)
        assert P.saturated_volume == round(h.volume * factorial(n))
        assert set(P.vertices) == hull_oracle(J)[0]


def test_volume_rejects_rank_mismatch():
    with pytest.raises(PolytopeError):
        normalized_volume(NewtonPolytope([(1, 0), (0, 1)]), IntegerLattice.from_generators([(1, 0)]))


def test_ehrhart_leading_term():
    # k-th finite difference of the Ehrhart polynomial is the normalized volume
    J = [(2, 0), (1, 3), (0, 1)]
    P = NewtonPolytope(J)
    counts = [brute_count(J, t) for t in range(0, 4)]
    second = counts[2] - 2 * counts[1] + counts[0]
    assert second == P.saturated_volume
    mine = [sum(len(Y) for Y, _, _ in P.lattice_points(t)) for t in range(0, 4)]
    assert mine == counts


def test_hilbert_examples():
    P = NewtonPolytope([(1,)])
    h = hilbert_numerator(P, IntegerLattice.standard(1))
    assert h.a == (1, 0) and h.N == 1 and h.W0[:4] == (1, 1, 1, 1)
    Q = NewtonPolytope([(1, 0), (0, 1)])
    assert hilbert_numerator(Q, IntegerLattice.standard(2)).total == 1
    # even-sum sublattice of the doubled triangle: a = (1, 0, 1, 0, 0) with N = 2
    T = NewtonPolytope([(2, 0), (0, 2)])
    h = hilbert_numerator(T, IntegerLattice.from_generators([(1, 1), (0, 2)]))
    assert h.N == 2 and h.a == (1, 0, 1, 0, 0)


@pytest.mark.parametrize("p,d,n", [(2, 2, 2), (2, 4, 2), (3, 3, 2), (3, 6, 2), (2, 2, 3), (2, 4, 3)])
def test_hilbert_total_is_volume_for_katz_lattice(p, d, n):
    k = 0
    while d % p**(k + 1) == 0:
        k += 1
    J = [tuple(d * int(i == j) for j in range(n)) for i in range(n)]
    B = [tuple([p**k] + [0] * (n - 1))] + [tuple([-1] + [int(t == i) for t in range(1, n)]) for i in range(1, n)]
    M = IntegerLattice.from_generators(B)
    P = NewtonPolytope(J)
    h = hilbert_numerator(P, M)
    assert h.total == normalized_volume(P, M) == Fraction(d**n, p**k)


def test_mu_examples():
    f = poly(CUBIC, 3)
    assert mu(f.support, p=3) == 2
    assert mu(f.support, p=5) == 1
    assert mu(f.support, p=2) == 1
    for p, ks in ((2, (1, 2)), (3, (1, 1, 2)), (2, (1, 1, 1))):
        n = len(ks)
        J = [tuple(p**ks[i] * int(i == j) for j in range(n)) for i in range(n)]
        assert mu(J, p=p) == n


def test_omega_examples():
    assert omega(TRI_J, p=7) == Fraction(7, 25)
    assert omega(TRI_J, p=2) == Fraction(7, 25)
    assert omega(TRI_J, p=5) == 1
    assert omega([(1, 1, 1)], M=IntegerLattice.standard(3)) == 1


def test_mu_cap_inconclusive():
    J = [(4, 0), (0, 4)]
    with pytest.raises(SearchInconclusive):
        mu(J, p=2, cap=1)


def test_restrict_and_convenient():
    f = poly("x1*x2 + x1^2 + x2^3", 2)
    assert restrict(f, ()) == f
    g = poly("x1*x2", 2)
    assert restrict(g, (1,)).is_zero()
    assert not convenient(g)
    assert convenient(dwork_yf(4, 2))
    yf = dwork_yf(4, 2)
    for r in range(5):
        for A in itertools.combinations(range(4), r):
            assert poly_dim(restrict(yf, A)) == 4 - r
    with pytest.raises(PolytopeError):
        restrict(yf, (4,))  # y is toric


def test_omega_monotone_and_ambient_case():
    # p does not divide [Z^2 : Z<J>] = 25 at p = 7: M_J is the ambient lattice
    MJ = prime_to_p_saturation(TRI_J, 7)[0]
    assert MJ == IntegerLattice.standard(2)
    assert omega(TRI_J, p=7) == omega(TRI_J, M=IntegerLattice.standard(2))
    # enlarging M (M_J at p=5 inside Z^2) cannot raise omega
    assert omega(TRI_J, M=IntegerLattice.standard(2)) <= omega(TRI_J, p=5)


def test_katz_support_faces_through_origin_are_restrictions():
    from expsum_lattice.formulas import origin_faces_are_restrictions
    assert origin_faces_are_restrictions(katz_support_poly(2, 4, 3))
