"""Newton polytopes Delta(J) = conv(J u {0}): facets, faces, lattice volumes,
weights, dilation counts, and the mu / omega invariants.

Everything is done in the coordinates of the saturated lattice
Z^n cap R<J>, where the polytope is full-dimensional and lattice points are
integer vectors.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from math import factorial, lcm
from typing import Iterable, Sequence

import numpy as np

from ._linalg import det_int, inverse_frac, rank, solve_left
from .lattice import (IntegerLattice, _integer_left_kernel, index_of, intersect_span, prime_to_p_saturation,
                      span_lattice)
from .poly import LaurentPoly

Point = tuple[int, ...]


class PolytopeError(ValueError):
    pass


class SearchInconclusive(RuntimeError):
    """A dilation search hit its cap without an answer."""


# -- exact double description ---------------------------------------------------

def _primitive(v: list[int]) -> list[int]:
    from math import gcd

    g = 0
    for x in v:
        g = gcd(g, x)
    return [x // g for x in v] if g > 1 else v


def facets_of(points: Sequence[Sequence[int]]) -> list[tuple[tuple[int, ...], int]]:
    """Facets a.x <= b of the convex hull of full-dimensional integer points.

    Extreme rays (a, b) of the cone {a.x_i <= b for all i}, found by the
    double-description method with the combinatorial adjacency test.  Normals
    are primitive integer vectors.
    """
    pts = [list(map(int, x)) for x in points]
    d = len(pts[0])
    rows = [x + [-1] for x in pts]  # rows . (a, b) <= 0
    dim = d + 1
    # initial basis of d+1 independent rows
    chosen: list[int] = []
    for i, r in enumerate(rows):
        if rank([rows[j] for j in chosen] + [r]) > len(chosen):
            chosen.append(i)
            if len(chosen) == dim:
                break
    if len(chosen) < dim:
        raise PolytopeError("points are not full-dimensional")
    A0 = [rows[i] for i in chosen]
    inv = inverse_frac(A0)
    rays: list[list[int]] = []
    for j in range(dim):
        col = [-inv[i][j] for i in range(dim)]
        den = lcm(*(c.denominator for c in col))
        rays.append(_primitive([int(c * den) for c in col]))
    tight = [frozenset(chosen[i] for i in range(dim) if i != j) for j in range(dim)]
    done = set(chosen)
    for i, row in enumerate(rows):
        if i in done:
            continue
        vals = [sum(x * y for x, y in zip(row, r)) for r in rays]
        plus = [k for k, v in enumerate(vals) if v > 0]
        if not plus:
            tight = [t | {i} if v == 0 else t for t, v in zip(tight, vals)]
            done.add(i)
            continue
        minus = [k for k, v in enumerate(vals) if v < 0]
        new_rays, new_tight = [], []
        for k, v in enumerate(vals):
            if v <= 0:
                new_rays.append(rays[k])
                new_tight.append(tight[k] | {i} if v == 0 else tight[k])
        for a in plus:
            for b in minus:
                common = tight[a] & tight[b]
                if len(common) < dim - 2:
                    continue
                if any(c != a and c != b and common <= tight[c] for c in range(len(rays))):
                    continue
                va, vb = vals[a], vals[b]
                r = [va * y - vb * x for x, y in zip(rays[a], rays[b])]
                new_rays.append(_primitive(r))
                new_tight.append(common | {i})
        rays, tight = new_rays, new_tight
        done.add(i)
    return sorted((tuple(r[:d]), r[d]) for r in rays)


def _lattice_volume(verts: Sequence[Sequence[int]]) -> int:
    """d! * Euclidean volume of a full-dimensional lattice polytope in Z^d."""
    verts = [tuple(v) for v in verts]
    d = len(verts[0]) if verts else 0
    if d == 0:
        return 1
    if d == 1:
        xs = [v[0] for v in verts]
        return max(xs) - min(xs)
    if len(verts) == d + 1:
        v0 = verts[0]
        return abs(det_int([[x - y for x, y in zip(v, v0)] for v in verts[1:]]))
    facets = facets_of(verts)
    v0 = verts[0]
    total = 0
    for a, b in facets:
        dist = b - sum(x * y for x, y in zip(a, v0))
        if dist == 0:
            continue
        on = [v for v in verts if sum(x * y for x, y in zip(a, v)) == b]
        # lattice of the facet hyperplane: base point + kernel of a
        kern = _integer_left_kernel([[x] for x in a])
        base = on[0]
        sub = []
        for v in on:
            c = solve_left(kern, [x - y for x, y in zip(v, base)])
            sub.append(tuple(int(x) for x in c))
        sub = _extreme_points(sub)
        total += dist * _lattice_volume(sub)
    return total


def _extreme_points(pts: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    pts = sorted(set(tuple(p) for p in pts))
    d = len(pts[0])
    if d == 0 or len(pts) <= d + 1:
        return pts
    if d == 1:
        return [min(pts), max(pts)]
    fs = facets_of(pts)
    out = []
    for v in pts:
        normals = [a for a, b in fs if sum(x * y for x, y in zip(a, v)) == b]
        if normals and rank(normals) == d:
            out.append(v)
    return out


# -- the polytope ------------------------------------------------------------------

@dataclass(frozen=True)
class Face:
    vertices: frozenset[int]
    dim: int
    contains_origin: bool

    def points(self, poly: "NewtonPolytope") -> list[Point]:
        return [poly.vertices[i] for i in sorted(self.vertices)]


class NewtonPolytope:
    """conv(J u {0}) in Z^n with its facets, vertices and face lattice."""

    def __init__(self, J: Iterable[Sequence[int]], n: int | None = None):
        J = sorted({tuple(int(x) for x in j) for j in J})
        if not J:
            if n is None:
                raise PolytopeError("J must be nonempty")
            J = [(0,) * n]
        self.ambient_dim = len(J[0])
        self.J = J
        origin = (0,) * self.ambient_dim
        self.points = sorted(set(J) | {origin})
        nonzero = [j for j in self.points if any(j)]
        if nonzero:
            self.saturation = span_lattice(nonzero)[1]
        else:
            self.saturation = IntegerLattice(self.ambient_dim, ())
        self.dim = self.saturation.rank
        B = self.saturation.basis
        self._coords = {u: tuple(int(c) for c in solve_left(B, u)) for u in self.points} if self.dim else \
            {u: () for u in self.points}
        if self.dim == 0:
            self.facets: list[tuple[tuple[int, ...], int]] = []
            self._vertex_coords = [()]
            self.vertices = [origin]
        else:
            self.facets = facets_of(list(self._coords.values()))
            verts = []
            for u in self.points:
                x = self._coords[u]
                normals = [a for a, b in self.facets if _dot(a, x) == b]
                if normals and rank(normals) == self.dim:
                    verts.append(u)
            self.vertices = verts
            self._vertex_coords = [self._coords[u] for u in verts]

    # -- coordinates --------------------------------------------------------

    def coords(self, u: Sequence[int]) -> tuple[int, ...] | None:
        """Integer coordinates in the saturation basis, None outside the span."""
        if self.dim == 0:
            return () if not any(u) else None
        c = solve_left(self.saturation.basis, u)
        if c is None:
            return None
        return tuple(int(x) for x in c)

    @cached_property
    def _dual_matrix(self) -> list[list[Fraction]]:
        B = self.saturation.basis
        G = [[_dot(r, s) for s in B] for r in B]
        Gi = inverse_frac(G)
        n = self.ambient_dim
        return [[sum((B[j][c] * Gi[j][i] for j in range(self.dim)), Fraction(0)) for i in range(self.dim)]
                for c in range(n)]

    def ambient_facets(self) -> list[tuple[tuple[Fraction, ...], int]]:
        """Facets as (rational normal in R^n, offset): normal . u <= offset on the span."""
        L = self._dual_matrix
        return [(tuple(sum((L[c][i] * a[i] for i in range(self.dim)), Fraction(0)) for c in range(self.ambient_dim)), b)
                for a, b in self.facets]

    def contains(self, u: Sequence[int], t: int | Fraction = 1) -> bool:
        x = self.coords(u)
        if x is None:
            return False
        return all(_dot(a, x) <= t * b for a, b in self.facets)

    # -- faces ---------------------------------------------------------------

    @cached_property
    def facet_vertex_sets(self) -> list[frozenset[int]]:
        return [frozenset(i for i, x in enumerate(self._vertex_coords) if _dot(a, x) == b)
                for a, b in self.facets]

    @cached_property
    def faces(self) -> list[Face]:
        """All nonempty faces, including the polytope itself."""
        full = frozenset(range(len(self.vertices)))
        found = {full}
        frontier = set(self.facet_vertex_sets)
        found |= frontier
        while frontier:
            nxt = set()
            for s in frontier:
                for t in self.facet_vertex_sets:
                    c = s & t
                    if c and c not in found:
                        nxt.add(c)
            found |= nxt
            frontier = nxt
        out = [self._make_face(s) for s in found]
        return sorted(out, key=lambda f: (f.dim, sorted(f.vertices)))

    def _make_face(self, s: frozenset[int]) -> Face:
        vs = [self._vertex_coords[i] for i in sorted(s)]
        dim = rank([[x - y for x, y in zip(v, vs[0])] for v in vs[1:]]) if len(vs) > 1 else 0
        supporting = [b for (a, b), fs in zip(self.facets, self.facet_vertex_sets) if s <= fs]
        return Face(s, dim, all(b == 0 for b in supporting))

    def face_contains(self, face: Face, u: Sequence[int]) -> bool:
        x = self.coords(u)
        if x is None:
            return False
        if not self.contains(u):
            return False
        for (a, b), fs in zip(self.facets, self.facet_vertex_sets):
            if face.vertices <= fs and _dot(a, x) != b:
                return False
        return True

    def face_points(self, face: Face) -> list[Point]:
        """J cap sigma."""
        return [j for j in self.J if self.face_contains(face, j)]

    # -- weights ------------------------------------------------------------------

    @cached_property
    def weight_denominator(self) -> int:
        bs = [b for _, b in self.facets if b > 0]
        return lcm(*bs) if bs else 1

    def in_cone(self, u: Sequence[int]) -> bool:
        x = self.coords(u)
        return x is not None and all(_dot(a, x) <= 0 for a, b in self.facets if b == 0)

    def weight(self, u: Sequence[int]) -> Fraction:
        x = self.coords(u)
        if x is None or any(_dot(a, x) > 0 for a, b in self.facets if b == 0):
            raise PolytopeError(f"{tuple(u)} is not in the cone over the polytope")
        w = Fraction(0)
        for a, b in self.facets:
            if b > 0:
                w = max(w, Fraction(_dot(a, x), b))
        return w

    # -- volume ------------------------------------------------------------------

    @cached_property
    def saturated_volume(self) -> int:
        """dim! * volume, normalized by the saturation lattice Z^n cap R<J>."""
        return _lattice_volume(self._vertex_coords)

    # -- lattice points in dilations ----------------------------------------------------

    def _lattice_frame(self, M: IntegerLattice | None):
        """Matrix T whose rows are M's basis in saturation coordinates."""
        if M is None:
            return [[int(i == j) for j in range(self.dim)] for i in range(self.dim)]
        if M.rank != self.dim:
            raise PolytopeError(f"lattice rank {M.rank} differs from polytope dimension {self.dim}")
        T = []
        for b in M.basis:
            x = self.coords(b)
            if x is None:
                raise PolytopeError("lattice is not contained in the span of the polytope")
            T.append(list(x))
        if self.dim and det_int(T) == 0:
            raise PolytopeError("lattice does not span the polytope")
        return T

    def lattice_points(self, t: int, M: IntegerLattice | None = None):
        """Yield (y, ambient u, N*w(u)) arrays for points of M in t*Delta, in chunks."""
        N = self.weight_denominator
        if self.dim == 0:
            yield (np.zeros((1, 0), dtype=np.int64), np.zeros((1, self.ambient_dim), dtype=np.int64),
                   np.zeros(1, dtype=np.int64))
            return
        T = self._lattice_frame(M)
        Tinv = inverse_frac(T)
        vy = [[sum((Fraction(x[i]) * Tinv[i][j] for i in range(self.dim)), Fraction(0)) for j in range(self.dim)]
              for x in self._vertex_coords]
        lo = [int(np.floor(min(v[j] for v in vy) * t)) for j in range(self.dim)]
        hi = [int(np.ceil(max(v[j] for v in vy) * t)) for j in range(self.dim)]
        TA = np.array([[_dot(T[r], a) for a, _ in self.facets] for r in range(self.dim)], dtype=np.int64)
        bvec = np.array([b for _, b in self.facets], dtype=np.int64)
        pos = bvec > 0
        scale = np.array([N // b if b > 0 else 0 for b in bvec], dtype=np.int64)
        amb = np.array(T, dtype=np.int64) @ np.array(self.saturation.basis, dtype=np.int64)
        rest = [np.arange(lo[j], hi[j] + 1, dtype=np.int64) for j in range(1, self.dim)]
        if rest:
            grid = np.stack(np.meshgrid(*rest, indexing="ij"), axis=-1).reshape(-1, self.dim - 1)
        else:
            grid = np.zeros((1, 0), dtype=np.int64)
        for y0 in range(lo[0], hi[0] + 1):
            Y = np.concatenate([np.full((grid.shape[0], 1), y0, dtype=np.int64), grid], axis=1)
            vals = Y @ TA
            ok = (vals <= t * bvec).all(axis=1)
            if not ok.any():
                continue
            Y, vals = Y[ok], vals[ok]
            nw = (vals[:, pos] * scale[pos]).max(axis=1) if pos.any() else np.zeros(len(Y), dtype=np.int64)
            nw = np.maximum(nw, 0)
            yield Y, Y @ amb, nw

    def count_W0(self, k_max: int, M: IntegerLattice | None = None) -> list[int]:
        """W0(k) = #{u in M : w(u) = k/N} for k = 0..k_max."""
        N = self.weight_denominator
        t = -(-k_max // N)
        counts = np.zeros(k_max + 1, dtype=np.int64)
        for _, _, nw in self.lattice_points(max(t, 0), M):
            nw = nw[nw <= k_max]
            counts += np.bincount(nw, minlength=k_max + 1)[: k_max + 1]
        return [int(c) for c in counts]

    def to_json(self) -> dict:
        return {
            "ambient_dim": self.ambient_dim,
            "dim": self.dim,
            "vertices": [list(v) for v in self.vertices],
            "facets": [{"normal": [str(c) for c in a], "offset": b} for a, b in self.ambient_facets()],
            "saturation_basis": [list(r) for r in self.saturation.basis],
            "weight_denominator": self.weight_denominator,
        }


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def newton_polytope(J: Iterable[Sequence[int]] | LaurentPoly) -> NewtonPolytope:
    if isinstance(J, LaurentPoly):
        return NewtonPolytope(J.support, J.nvars)
    return NewtonPolytope(J)


def faces_excluding_origin(P: NewtonPolytope) -> list[Face]:
    return [f for f in P.faces if not f.contains_origin]


def faces_containing_origin(P: NewtonPolytope) -> list[Face]:
    return [f for f in P.faces if f.contains_origin]


def weight(u: Sequence[int], P: NewtonPolytope) -> Fraction:
    return P.weight(u)


def weight_denominator(P: NewtonPolytope) -> int:
    return P.weight_denominator


def _as_int(x: Fraction) -> int | Fraction:
    return int(x) if x.denominator == 1 else x


def normalized_volume(sigma: NewtonPolytope | Face, M: IntegerLattice, P: NewtonPolytope | None = None) -> int | Fraction:
    """(dim sigma)! * volume of sigma measured so that a fundamental domain of M has volume 1.

    ``sigma`` is a NewtonPolytope or a face (of ``P``) containing the origin.
    """
    if isinstance(sigma, Face):
        if P is None:
            raise PolytopeError("a face needs its polytope")
        if not sigma.contains_origin:
            raise PolytopeError("only faces through the origin have a linear span to measure in")
        sigma = NewtonPolytope(sigma.points(P), P.ambient_dim)
    if sigma.dim == 0:
        if M.rank != 0:
            raise PolytopeError("lattice rank differs from polytope dimension")
        return 1
    if M.rank != sigma.dim:
        raise PolytopeError(f"lattice rank {M.rank} differs from polytope dimension {sigma.dim}")
    for b in M.basis:
        if not sigma.saturation.in_span(b):
            raise PolytopeError("lattice is not contained in the span of the polytope")
    return _as_int(Fraction(sigma.saturated_volume, index_of(M, sigma.saturation)))


# -- Hilbert data ---------------------------------------------------------------------

@dataclass(frozen=True)
class HilbertData:
    k: int
    N: int
    a: tuple[int, ...]
    W0: tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.a)

    def to_json(self) -> dict:
        return {"k": self.k, "N": self.N, "a": list(self.a)}


def counting_W0(P: NewtonPolytope, M: IntegerLattice | None, k_max: int) -> list[int]:
    return P.count_W0(k_max, M)


def hilbert_numerator(P: NewtonPolytope, M: IntegerLattice | None = None) -> HilbertData:
    """a_i with sum_u t^{w(u)} = (sum a_i t^{i/N}) / (1 - t)^k over u in M."""
    k, N = P.dim, P.weight_denominator
    top = (k + 2) * N
    W0 = P.count_W0(top, M)
    a = []
    for i in range(top + 1):
        s = 0
        for j in range(k + 1):
            if i - j * N >= 0:
                s += (-1) ** j * _binom(k, j) * W0[i - j * N]
        a.append(s)
    if any(x < 0 for x in a):
        raise PolytopeError(f"negative Hilbert numerator coefficient: {a}")
    if any(a[i] for i in range(k * N + 1, top + 1)):
        raise PolytopeError("Hilbert numerator does not terminate at kN")
    return HilbertData(k, N, tuple(a[: k * N + 1]), tuple(W0))


def _binom(n: int, k: int) -> int:
    return factorial(n) // (factorial(k) * factorial(n - k))


# -- mu and omega -----------------------------------------------------------------------------

def lifted_support(J: Iterable[Sequence[int]]) -> list[Point]:
    """J' = {(j, 1)}."""
    return [tuple(j) + (1,) for j in J]


def _in_span(M: IntegerLattice, P: NewtonPolytope) -> IntegerLattice:
    """M cap R<J>: the cone over Delta lies in R<J>, so nothing else can contribute."""
    if M.rank == P.dim:
        return M
    return intersect_span(M, [v for v in P.vertices if any(v)])


def mu(J: Iterable[Sequence[int]], M: IntegerLattice | None = None, p: int | None = None,
       cap: int | None = None) -> int:
    """Smallest t >= 1 with a point of M cap (N_+)^{n+1} in t * Delta(J').

    M defaults to the prime-to-p saturation of J'.  Raises SearchInconclusive
    past ``cap`` (default n + 1).
    """
    J = [tuple(j) for j in J]
    if any(x < 0 for j in J for x in j):
        raise PolytopeError("mu needs nonnegative exponents")
    Jp = lifted_support(J)
    if M is None:
        if p is None:
            raise PolytopeError("give M or p")
        M = prime_to_p_saturation(Jp, p)[0]
    P = NewtonPolytope(Jp)
    M = _in_span(M, P)
    cap = cap if cap is not None else len(J[0]) + 1
    for t in range(1, cap + 1):
        for _, U, _ in P.lattice_points(t, M):
            if (U > 0).all(axis=1).any():
                return t
    raise SearchInconclusive(f"no positive lattice point in the first {cap} dilations")


def omega(f: LaurentPoly | Iterable[Sequence[int]], M: IntegerLattice | None = None, p: int | None = None,
          cap: int | None = None) -> Fraction:
    """Smallest weight of a point of M cap (N_+)^n (M defaults to M_J)."""
    J = f.support if isinstance(f, LaurentPoly) else [tuple(j) for j in f]
    if isinstance(f, LaurentPoly):
        p = p or f.p
    if any(x < 0 for j in J for x in j):
        raise PolytopeError("omega needs a polynomial")
    if M is None:
        if p is None:
            raise PolytopeError("give M or p")
        M = prime_to_p_saturation(J, p)[0]
    P = NewtonPolytope(J)
    M = _in_span(M, P)
    N = P.weight_denominator
    cap = cap if cap is not None else len(J[0]) + 1
    for t in range(1, cap + 1):
        best = None
        for _, U, nw in P.lattice_points(t, M):
            pos = (U > 0).all(axis=1)
            if pos.any():
                m = int(nw[pos].min())
                best = m if best is None else min(best, m)
        if best is not None:
            return Fraction(best, N)
    raise SearchInconclusive(f"no positive lattice point in the first {cap} dilations")


# -- restrictions and convenience ----------------------------------------------------------

def restrict(f: LaurentPoly, A: Iterable[int]) -> LaurentPoly:
    """f_A: drop monomials involving any variable indexed by A (0-based)."""
    A = set(A)
    bad = [i for i in A if f.torus[i]]
    if bad:
        raise PolytopeError(f"variables {bad} are toric, not affine")
    return f.restrict_support(lambda j: all(j[i] == 0 for i in A))


def poly_dim(f: LaurentPoly) -> int:
    """dim Delta(f), with dim 0 for the zero polynomial."""
    if f.is_zero():
        return 0
    nz = [j for j in f.support if any(j)]
    return rank(nz) if nz else 0


def affine_subsets(f: LaurentPoly):
    idx = f.affine_indices()
    for r in range(len(idx) + 1):
        yield from combinations(idx, r)


def convenient(f: LaurentPoly) -> bool:
    d = poly_dim(f)
    return all(poly_dim(restrict(f, A)) == d - len(A) for A in affine_subsets(f))
