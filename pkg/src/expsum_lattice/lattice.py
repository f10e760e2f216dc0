"""Integer lattices: Smith/Hermite normal forms, saturations, indices, dual forms
and p-power reduction of Laurent polynomials."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from ._linalg import det_int, inverse_frac, p_adic_valuation, rank, solve_left
from .poly import LaurentPoly

IntMatrix = tuple[tuple[int, ...], ...]


class LatticeError(ValueError):
    pass


def _identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _freeze(m: Sequence[Sequence[int]]) -> IntMatrix:
    return tuple(tuple(int(x) for x in r) for r in m)


# -- normal forms ---------------------------------------------------------

def smith_normal_form(A: Sequence[Sequence[int]]) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """(U, D, V) with U*A*V = D, U and V unimodular, D diagonal with d1 | d2 | ...

    Classical elimination with the smallest nonzero entry as pivot.
    """
    D = [[int(x) for x in r] for r in A]
    m = len(D)
    n = len(D[0]) if m else 0
    U, V = _identity(m), _identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for M in (D, V):
            for r in M:
                r[i], r[j] = r[j], r[i]

    def add_row(dst, src, c):  # row dst += c * row src
        for M in (D, U):
            M[dst] = [x + c * y for x, y in zip(M[dst], M[src])]

    def add_col(dst, src, c):  # col dst += c * col src
        for M in (D, V):
            for r in M:
                r[dst] += c * r[src]

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    if D[i][j] and (best is None or abs(D[i][j]) < abs(D[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                break
            if best[0] != t:
                swap_rows(t, best[0])
            if best[1] != t:
                swap_cols(t, best[1])
            piv = D[t][t]
            dirty = False
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, -(D[i][t] // piv))
                    dirty |= D[i][t] != 0
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, -(D[t][j] // piv))
                    dirty |= D[t][j] != 0
            if dirty:
                continue
            bad = next((i for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % piv), None)
            if bad is None:
                break
            add_row(t, bad, 1)
        if t < m and t < n and D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
    return _freeze(U), _freeze(D), _freeze(V)


def hermite_normal_form(rows: Sequence[Sequence[int]]) -> IntMatrix:
    """Row-style HNF of the lattice generated by ``rows`` (zero rows dropped).

    Echelon form with positive pivots and entries above each pivot reduced
    into [0, pivot).
    """
    a = [[int(x) for x in r] for r in rows]
    if not a:
        return ()
    ncols = len(a[0])
    r = 0
    pivots = []
    for c in range(ncols):
        while True:
            nz = [i for i in range(r, len(a)) if a[i][c]]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(a[i][c]))
            a[r], a[i0] = a[i0], a[r]
            done = True
            for i in range(r + 1, len(a)):
                if a[i][c]:
                    q = a[i][c] // a[r][c]
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                    done &= a[i][c] == 0
            if done:
                break
        if r < len(a) and a[r][c]:
            if a[r][c] < 0:
                a[r] = [-x for x in a[r]]
            for i in range(r):
                q = a[i][c] // a[r][c]
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
            pivots.append(c)
            r += 1
            if r == len(a):
                break
    return _freeze(a[:r])


# -- lattices --------------------------------------------------------------

@dataclass(frozen=True)
class IndexSplit:
    """An index written as p^a * e with p not dividing e."""

    a: int
    e: int
    p: int

    @classmethod
    def of(cls, index: int, p: int) -> "IndexSplit":
        if index <= 0:
            raise LatticeError("index must be positive")
        a = 0
        while index % p == 0:
            index //= p
            a += 1
        return cls(a, index, p)

    @property
    def index(self) -> int:
        return self.p**self.a * self.e

    def to_json(self) -> dict:
        return {"a": self.a, "e": self.e}


@dataclass(frozen=True)
class IntegerLattice:
    """Sublattice of Z^n stored by its canonical (HNF) basis."""

    ambient_dim: int
    basis: IntMatrix

    @classmethod
    def from_generators(cls, gens: Iterable[Sequence[int]], n: int | None = None) -> "IntegerLattice":
        gens = [tuple(int(x) for x in g) for g in gens]
        if n is None:
            if not gens:
                raise LatticeError("cannot infer ambient dimension")
            n = len(gens[0])
        return cls(n, hermite_normal_form(gens) if gens else ())

    @classmethod
    def standard(cls, n: int) -> "IntegerLattice":
        return cls(n, _freeze(_identity(n)))

    @property
    def rank(self) -> int:
        return len(self.basis)

    def coordinates(self, u: Sequence[int]) -> list[Fraction] | None:
        """Rational coordinates in the basis, or None if u is outside the span."""
        return solve_left(self.basis, u)

    def in_span(self, u: Sequence[int]) -> bool:
        return self.coordinates(u) is not None

    def contains(self, u: Sequence[int]) -> bool:
        x = self.coordinates(u)
        return x is not None and all(c.denominator == 1 for c in x)

    def contains_lattice(self, other: "IntegerLattice") -> bool:
        return all(self.contains(b) for b in other.basis)

    def gram_det(self) -> int:
        """det(B B^T): the squared covolume."""
        B = self.basis
        return det_int([[sum(x * y for x, y in zip(r, s)) for s in B] for r in B])

    def to_json(self) -> dict:
        return {"ambient_dim": self.ambient_dim, "rank": self.rank, "basis": [list(r) for r in self.basis]}


def _snf_of_rows(J: Sequence[Sequence[int]]):
    U, D, V = smith_normal_form(J)
    W = inverse_frac(V)
    W = [[int(x) for x in r] for r in W]
    k = sum(1 for i in range(min(len(D), len(D[0]))) if D[i][i])
    d = [D[i][i] for i in range(k)]
    return U, d, V, W, k


def span_lattice(J: Iterable[Sequence[int]]) -> tuple[IntegerLattice, IntegerLattice]:
    """Z<J> and its saturation Z^n cap R<J>."""
    J = [tuple(int(x) for x in j) for j in J]
    if not J:
        raise LatticeError("J must be nonempty")
    n = len(J[0])
    _, d, _, W, k = _snf_of_rows(J)
    zj = IntegerLattice.from_generators([[d[i] * x for x in W[i]] for i in range(k)], n)
    amb = IntegerLattice.from_generators([W[i] for i in range(k)], n)
    return zj, amb


def _p_part(d: int, p: int) -> int:
    out = 1
    while d % p == 0:
        d //= p
        out *= p
    return out


def prime_to_p_saturation(J: Iterable[Sequence[int]], p: int) -> tuple[IntegerLattice, IndexSplit]:
    """M_J and the split p^a e of [Z^n cap R<J> : Z<J>]."""
    J = [tuple(int(x) for x in j) for j in J]
    if not J:
        raise LatticeError("J must be nonempty")
    n = len(J[0])
    _, d, _, W, k = _snf_of_rows(J)
    mj = IntegerLattice.from_generators([[_p_part(d[i], p) * x for x in W[i]] for i in range(k)], n)
    idx = 1
    for x in d:
        idx *= x
    return mj, IndexSplit.of(idx, p)


def ambient_saturation(M: IntegerLattice) -> IntegerLattice:
    if M.rank == 0:
        return M
    return span_lattice(M.basis)[1]


def lattice_index(sub: IntegerLattice, sup: IntegerLattice, p: int) -> IndexSplit:
    return IndexSplit.of(index_of(sub, sup), p)


def index_of(sub: IntegerLattice, sup: IntegerLattice) -> int:
    """[sup : sub] for lattices of equal rank with sub inside sup."""
    if sub.ambient_dim != sup.ambient_dim or sub.rank != sup.rank:
        raise LatticeError("lattices have different rank or ambient dimension")
    coords = []
    for b in sub.basis:
        x = sup.coordinates(b)
        if x is None or any(c.denominator != 1 for c in x):
            raise LatticeError(f"{b} is not in the super-lattice")
        coords.append([int(c) for c in x])
    return abs(det_int(coords)) if coords else 1


def intersect_span(M: IntegerLattice, gens: Iterable[Sequence[int]]) -> IntegerLattice:
    """M cap R<gens> (both inside Z^n)."""
    gens = [tuple(g) for g in gens if any(g)]
    n = M.ambient_dim
    if not gens:
        return IntegerLattice(n, ())
    sat = span_lattice(gens)[1]
    # M cap V = M cap sat; sat is saturated, so an element of M lies in V iff it
    # lies in sat.  Kernel of the map M -> Q^n / V computed via SNF.
    if M.rank == 0:
        return IntegerLattice(n, ())
    comp = _complement_forms(sat)
    if not comp:
        return M
    # rows of M.basis times comp (integer) -> find integer kernel
    img = [[sum(b[i] * c[i] for i in range(n)) for c in comp] for b in M.basis]
    kern = _integer_left_kernel(img)
    vecs = [[sum(k[i] * M.basis[i][j] for i in range(M.rank)) for j in range(n)] for k in kern]
    return IntegerLattice.from_generators(vecs, n) if vecs else IntegerLattice(n, ())


def _complement_forms(sat: IntegerLattice) -> list[list[int]]:
    """Integer linear forms whose common kernel is R<sat>."""
    n = sat.ambient_dim
    if sat.rank == 0:
        return _identity(n)
    _, _, V, _, k = _snf_of_rows(sat.basis)
    return [[V[r][c] for r in range(n)] for c in range(k, n)]


def _integer_left_kernel(A: Sequence[Sequence[int]]) -> list[list[int]]:
    """Basis of {x in Z^m : x A = 0}."""
    m = len(A)
    if m == 0:
        return []
    if not A[0]:
        return _identity(m)
    U, D, _ = smith_normal_form(A)
    r = sum(1 for i in range(min(len(D), len(D[0]))) if D[i][i])
    return [list(U[i]) for i in range(r, m)]


# -- dual forms -----------------------------------------------------------------

@dataclass(frozen=True)
class LinearForm:
    """u -> sum c_i u_i with rational c; p^a * form is integral on the saturation."""

    coefficients: tuple[Fraction, ...]
    p: int
    a: int = 0

    def __call__(self, u: Sequence[int]) -> Fraction:
        return sum((c * x for c, x in zip(self.coefficients, u)), Fraction(0))

    @property
    def denominator_bound(self) -> int:
        return self.p**self.a

    def to_json(self) -> list[str]:
        return [str(c) for c in self.coefficients]


def dual_forms(M: IntegerLattice, p: int, a: int | None = None,
               basis: Sequence[Sequence[int]] | None = None) -> list[LinearForm]:
    """Forms dual to a basis of M (default the HNF basis): l_i(b_j) = delta_ij.

    They are computed as B^T (B B^T)^{-1}, so they vanish on the orthogonal
    complement of R<M>; on Z^n cap R<M> they take values in p^{-a} Z.
    """
    B = [list(r) for r in (basis if basis is not None else M.basis)]
    if basis is not None:
        if hermite_normal_form(B) != M.basis:
            raise LatticeError("given basis does not generate M")
    k = len(B)
    if k == 0:
        return []
    n = len(B[0])
    G = [[sum(x * y for x, y in zip(r, s)) for s in B] for r in B]
    Ginv = inverse_frac(G)
    forms = []
    for i in range(k):
        coeffs = tuple(sum((Ginv[i][j] * B[j][c] for j in range(k)), Fraction(0)) for c in range(n))
        forms.append(coeffs)
    if a is None:
        sat = ambient_saturation(IntegerLattice.from_generators(B, n))
        split = lattice_index(IntegerLattice.from_generators(B, n), sat, p)
        a = split.a
    return [LinearForm(c, p, a) for c in forms]


def stratum_index(u: Sequence[int], forms: Sequence[LinearForm]) -> int:
    """i with u in M_i: minus the smallest p-adic order of the l(u), floored at 0."""
    worst = 0
    for ell in forms:
        v = p_adic_valuation(ell(u), ell.p)
        if v is not None and v < worst:
            worst = v
    return -worst


# -- p-power reduction ------------------------------------------------------------

@dataclass(frozen=True)
class PReduction:
    """f(x) = g(y_1^{d_1}, ..., y_k^{d_k}) under x^j = y^{jV}.

    ``unimodular_change`` is V; ``inverse_change`` is W = V^{-1}, so that
    y_i = prod_m x_m^{W[i][m]} and x_m = prod_i y_i^{V[m][i]}.
    """

    unimodular_change: IntMatrix
    inverse_change: IntMatrix
    d: tuple[int, ...]
    b: tuple[int, ...]
    e: tuple[int, ...]
    g: LaurentPoly
    p_reduced: LaurentPoly
    p: int

    @property
    def k(self) -> int:
        return len(self.d)

    def exponent_map(self, j: Sequence[int]) -> tuple[int, ...]:
        """Exponent of g corresponding to the exponent j of f."""
        n = len(j)
        c = [sum(j[m] * self.unimodular_change[m][i] for m in range(n)) for i in range(n)]
        if any(c[i] for i in range(self.k, n)) or any(c[i] % self.d[i] for i in range(self.k)):
            raise LatticeError(f"exponent {tuple(j)} is not in the reducing lattice")
        return tuple(c[i] // self.d[i] for i in range(self.k))

    def expand(self) -> LaurentPoly:
        """Reassemble f from g (round-trip check)."""
        n = len(self.unimodular_change)
        W = self.inverse_change

        def back(c):
            full = [c[i] * self.d[i] for i in range(self.k)] + [0] * (n - self.k)
            return tuple(sum(full[i] * W[i][m] for i in range(n)) for m in range(n))

        return self.g.map_exponents(back, n, torus=True)

    def to_json(self) -> dict:
        return {
            "unimodular_change": [list(r) for r in self.unimodular_change],
            "d": list(self.d),
            "p_part_exponents": list(self.b),
            "e": list(self.e),
            "g": str(self.g),
            "p_reduced": str(self.p_reduced),
        }


def _reduce_with_snf(f: LaurentPoly, rows: Sequence[Sequence[int]], p: int) -> PReduction:
    n = f.nvars
    _, d, V, W, k = _snf_of_rows(rows)
    b, e = [], []
    for x in d:
        pp = _p_part(x, p)
        b.append(p_adic_valuation(pp, p))
        e.append(x // pp)
    red = PReduction(tuple(tuple(r) for r in V), tuple(tuple(r) for r in W), tuple(d), tuple(b), tuple(e),
                     None, None, p)  # type: ignore[arg-type]
    names = tuple(f"y{i + 1}" for i in range(k))
    g = f.map_exponents(red.exponent_map, k, names=names, torus=True)
    full = f.map_exponents(lambda j: tuple(c * ei for c, ei in zip(red.exponent_map(j), e)), k, names=names, torus=True)
    object.__setattr__(red, "g", g)
    object.__setattr__(red, "p_reduced", full)
    return red


def p_power_reduce(f: LaurentPoly, p: int | None = None) -> PReduction:
    """Reduction along Z<J>: g has exponents c_i/d_i where c = jV."""
    if f.is_zero():
        raise LatticeError("cannot reduce the zero polynomial")
    p = p or f.p
    J = f.support
    if all(not any(j) for j in J):
        raise LatticeError("constant polynomial has no p-power reduction")
    return _reduce_with_snf(f, J, p)


def reduce_by_lattice(f: LaurentPoly, M: IntegerLattice, p: int | None = None) -> PReduction:
    """Same construction with the SNF of a lattice M containing Z<J>."""
    p = p or f.p
    if M.rank == 0:
        raise LatticeError("lattice has rank zero")
    for j in f.support:
        if not M.contains(j):
            raise LatticeError(f"exponent {j} is not in M")
    return _reduce_with_snf(f, M.basis, p)


def lattice_from_spec(kind: str, J: Sequence[Sequence[int]], p: int, basis_rows=None) -> IntegerLattice:
    """Resolve the CLI lattice choices MJ / ZJ / ambient / explicit basis."""
    if basis_rows is not None:
        n = len(J[0])
        if any(len(row) != n for row in basis_rows):
            raise LatticeError(f"basis rows must have length {n}")
        return IntegerLattice.from_generators(basis_rows, n)
    if kind == "MJ":
        return prime_to_p_saturation(J, p)[0]
    zj, amb = span_lattice(J)
    if kind == "ZJ":
        return zj
    if kind == "ambient":
        return amb
    raise LatticeError(f"unknown lattice kind {kind!r}")


def rank_of(vectors: Sequence[Sequence[int]]) -> int:
    return rank(vectors) if vectors else 0
