"""Nondegeneracy relative to (Delta(f), M), by exhaustive torus search.

For each face sigma not containing the origin the system
E_{l_i}(f_sigma) = sum_u l_i(u) a_u x^u, with {l_i} dual to a basis of M, is
searched for a common zero in (F_{q^m}^x)^n for m = 1..m_max.  A witness is
a proof of degeneracy; an empty search is only evidence.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .ff.field import GF
from .ff.sums import CHUNK, BudgetExceeded, _Prepared, _values_chunk
from .lattice import IntegerLattice, LinearForm, PReduction, dual_forms, reduce_by_lattice, span_lattice
from .poly import LaurentPoly
from .polytope import Face, NewtonPolytope, faces_excluding_origin

DEFAULT_M_MAX = 3
DEFAULT_BUDGET = 10**8


class NondegError(ValueError):
    pass


class Status(str, Enum):
    DEGENERATE = "Degenerate"
    NONDEGENERATE_UP_TO_DEGREE = "NondegenerateUpToDegree"


@dataclass(frozen=True)
class FaceSystem:
    face: Face
    points: tuple[tuple[int, ...], ...]  # J cap sigma
    polynomials: tuple[LaurentPoly, ...]
    forms: tuple[LinearForm, ...]


@dataclass(frozen=True)
class Witness:
    m: int
    field: GF
    point: tuple[int, ...]  # encoded elements of F_{q^m}
    face_points: tuple[tuple[int, ...], ...]

    def to_json(self) -> dict:
        return {"m": self.m, "point": [self.field.digits(x) for x in self.point],
                "face": [list(u) for u in self.face_points]}


@dataclass(frozen=True)
class NondegVerdict:
    status: Status
    searched_bound: int
    witness: Witness | None = None
    path: str = "direct"

    @property
    def degenerate(self) -> bool:
        return self.status is Status.DEGENERATE

    def to_json(self) -> dict:
        return {"status": self.status.value, "searched_bound": self.searched_bound, "path": self.path,
                "witness": None if self.witness is None else self.witness.to_json()}


# -- face systems ------------------------------------------------------------------

def face_polynomial(f: LaurentPoly, sigma: Face, P: NewtonPolytope | None = None) -> LaurentPoly:
    P = P or NewtonPolytope(f.support, f.nvars)
    pts = set(P.face_points(sigma))
    return f.restrict_support(lambda j: j in pts)


def check_lattice(f: LaurentPoly, M: IntegerLattice) -> None:
    """Z<J> inside M inside Z^n cap R<J>."""
    J = [j for j in f.support if any(j)]
    if not J:
        raise NondegError("f has no nonconstant monomials")
    for j in J:
        if not M.contains(j):
            raise NondegError(f"exponent {j} is not in M (Z<J> must lie in M)")
    sat = span_lattice(J)[1]
    if M.rank != sat.rank or not sat.contains_lattice(M):
        raise NondegError("M must lie in Z^n cap R<J> with the same rank")


def default_lattice(f: LaurentPoly) -> IntegerLattice:
    """Z^n cap R<J>, which is Z^n when J spans."""
    return span_lattice([j for j in f.support if any(j)] or f.support)[1]


def euler_system(f_sigma: LaurentPoly, forms: Sequence[LinearForm]) -> list[LaurentPoly]:
    p = f_sigma.p
    out = []
    for ell in forms:
        scal = {}
        for u in f_sigma.terms:
            v = ell(u)
            if v.denominator % p == 0:
                raise NondegError(f"form value {v} at {u} has a p in its denominator")
            scal[u] = v.numerator * pow(v.denominator, -1, p)
        out.append(f_sigma.scale_terms(scal))
    return out


def build_face_systems(f: LaurentPoly, M: IntegerLattice, basis=None) -> list[FaceSystem]:
    check_lattice(f, M)
    P = NewtonPolytope(f.support, f.nvars)
    forms = dual_forms(M, f.p, basis=basis)
    systems = []
    for face in faces_excluding_origin(P):
        fs = face_polynomial(f, face, P)
        systems.append(FaceSystem(face, tuple(fs.support), tuple(euler_system(fs, forms)), tuple(forms)))
    return systems


# -- search --------------------------------------------------------------------------

def _search_system(polys: Sequence[LaurentPoly], big: GF, n: int, first_only: bool = True):
    """Flat log-index points of (F^x)^n where every polynomial vanishes."""
    sizes = [big.order - 1] * n
    total = int(np.prod(sizes, dtype=object))
    preps = [_Prepared(f.with_torus(True), big, [True] * n) for f in polys if not f.is_zero()]
    found = []
    for start in range(0, total, CHUNK):
        idx = np.arange(start, min(total, start + CHUNK), dtype=np.int64)
        ok = np.ones(idx.shape, dtype=bool)
        for prep in preps:
            ok &= _values_chunk(prep, idx) == 0
            if not ok.any():
                break
        hits = idx[ok]
        if hits.size:
            if first_only:
                return [int(hits[0])]
            found.extend(int(h) for h in hits)
    return found


def _decode(flat: int, big: GF, n: int) -> tuple[int, ...]:
    q1 = big.order - 1
    logs = []
    for _ in range(n):
        logs.append(flat % q1)
        flat //= q1
    return tuple(int(big.exp_table[l]) for l in reversed(logs))


def _verify(polys: Sequence[LaurentPoly], big: GF, point: Sequence[int]) -> bool:
    return all(f.evaluate(point, big) == 0 for f in polys)


def is_nondegenerate(f: LaurentPoly, M: IntegerLattice | None = None, m_max: int = DEFAULT_M_MAX,
                     budget: int | None = DEFAULT_BUDGET, basis=None) -> NondegVerdict:
    if M is None:
        M = default_lattice(f)
    systems = build_face_systems(f, M, basis)
    n = f.nvars
    for m in range(1, m_max + 1):
        big = f.field.extension(m)
        cost = (big.order - 1) ** n * max(len(systems), 1)
        if budget is not None and cost > budget:
            raise BudgetExceeded(f"nondegeneracy search at m={m} needs {cost} evaluations (budget {budget})")
        best = None
        for sysm in systems:
            hits = _search_system(sysm.polynomials, big, n, first_only=False)
            for h in hits:
                pt = _decode(h, big, n)
                if best is None or pt < best[0]:
                    best = (pt, sysm)
        if best is not None:
            # lexicographically smallest point over all faces at the first degree with any witness
            pt, sysm = best
            if not _verify(sysm.polynomials, big, pt):
                raise AssertionError("witness failed verification")
            return NondegVerdict(Status.DEGENERATE, m_max, Witness(m, big, pt, sysm.points))
    return NondegVerdict(Status.NONDEGENERATE_UP_TO_DEGREE, m_max)


def zero_sets(f: LaurentPoly, M: IntegerLattice, m: int, basis=None) -> dict[frozenset, frozenset]:
    """For each face (keyed by J cap sigma) the full set of torus zeros over F_{q^m}."""
    big = f.field.extension(m)
    out = {}
    for sysm in build_face_systems(f, M, basis):
        out[frozenset(sysm.points)] = frozenset(_search_system(sysm.polynomials, big, f.nvars, first_only=False))
    return out


# -- reduction path -------------------------------------------------------------------

def _roots_in_tower(field: GF, m: int, z: Sequence[int], d: Sequence[int], max_ext: int = 12):
    """Smallest extension F_{q^{m t}} containing d_i-th roots of all z_i, and the roots."""
    small = field.extension(m)
    for t in range(1, max_ext + 1):
        if (field.order ** (m * t)) > (1 << 24):
            break
        big = field.extension(m * t)
        emb = big.embedding_from(small)
        roots = []
        for zi, di in zip(z, d):
            r = big.nth_root(int(emb[zi]), di)
            if r is None:
                break
            roots.append(r)
        else:
            return m * t, big, roots
    raise NondegError("could not find the required roots in a small extension")


def pull_back_witness(red: PReduction, f: LaurentPoly, witness: Witness) -> Witness:
    """Map a witness for g back to f: y_i = z_i^{1/d_i}, x_m = prod_i y_i^{V[m][i]}."""
    n, k = f.nvars, red.k
    mm, big, ys = _roots_in_tower(f.field, witness.m, witness.point, red.d)
    ys = ys + [1] * (n - k)
    x = []
    for mrow in red.unimodular_change:
        v = 1
        for yi, e in zip(ys, mrow):
            v = big.mul(v, big.pow(yi, e))
        x.append(v)
    gface = set(witness.face_points)
    fpts = tuple(j for j in f.support if red.exponent_map(j) in gface)
    return Witness(mm, big, tuple(x), fpts)


def nondeg_via_reduction(f: LaurentPoly, M: IntegerLattice | None = None, m_max: int = DEFAULT_M_MAX,
                         budget: int | None = DEFAULT_BUDGET) -> NondegVerdict:
    """Decide via g with f(x) = g(y^d) relative to (Delta(g), Z^k)."""
    if M is None:
        M = default_lattice(f)
    check_lattice(f, M)
    red = reduce_by_lattice(f, M)
    g = red.g
    verdict = is_nondegenerate(g, IntegerLattice.standard(red.k), m_max, budget)
    if not verdict.degenerate:
        return NondegVerdict(verdict.status, m_max, None, "reduction")
    w = pull_back_witness(red, f, verdict.witness)
    # the pulled-back point must zero the face system of f on the matching face
    systems = build_face_systems(f, M)
    match = [s for s in systems if set(s.points) == set(w.face_points)]
    if not match or not _verify(match[0].polynomials, w.field, w.point):
        raise AssertionError("pulled-back witness does not satisfy the face system of f")
    return NondegVerdict(verdict.status, m_max, w, "reduction")


def push_forward_witness(red: PReduction, witness: Witness) -> tuple[int, ...]:
    """x -> z with z_i = (prod_m x_m^{W[i][m]})^{d_i} for i < k."""
    big = witness.field
    out = []
    for i in range(red.k):
        y = 1
        for xm, e in zip(witness.point, red.inverse_change[i]):
            y = big.mul(y, big.pow(xm, e))
        out.append(big.pow(y, red.d[i]))
    return tuple(out)
