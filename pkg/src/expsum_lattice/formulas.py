"""Closed-form predictions: degree bounds, nu(f), divisibility, top-weight counts."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .lattice import intersect_span, prime_to_p_saturation
from .poly import LaurentPoly
from .polytope import (NewtonPolytope, SearchInconclusive, affine_subsets, convenient,
                       faces_containing_origin, mu, normalized_volume, omega, poly_dim, restrict)

# provenance tags
TORUS_BOUND = "torus degree bound (volume over [Z^n:M_J])"
NONDEG_DEGREE = "nondegenerate torus degree k!V_{M_J}(f)"
AFFINE_DEGREE = "affine degree nu(f)"
CW_MU = "Chevalley-Warning via mu"
CW_OMEGA = "divisibility via omega(F) - s"
SUM_OMEGA = "sum divisibility ord_q S_1 >= omega"
TOP_WEIGHT = "highest-weight face sum"
KATZ = "diagonal-simplex closed form"
DWORK = "Dwork family closed form"


class FormulaError(ArithmeticError):
    pass


@dataclass(frozen=True)
class Prediction:
    kind: str
    value: int | Fraction | None
    provenance: str
    notes: tuple[str, ...] = field(default=())

    def to_json(self) -> dict:
        v = self.value
        return {"kind": self.kind, "value": None if v is None else (int(v) if isinstance(v, int) else str(v)),
                "provenance": self.provenance, "notes": list(self.notes)}


def _integral(x: Fraction | int, what: str) -> int:
    x = Fraction(x)
    if x.denominator != 1:
        raise FormulaError(f"{what} evaluated to the non-integer {x}")
    return int(x)


def torus_degree_bound(f: LaurentPoly, p: int | None = None) -> int:
    """dim! V(f) / [sat : M_J], measured in the span of J when J is not full rank."""
    p = p or f.p
    P = NewtonPolytope(f.support, f.nvars)
    if P.dim == 0:
        return 1
    MJ, _ = prime_to_p_saturation([j for j in f.support if any(j)] or f.support, p)
    return _integral(normalized_volume(P, MJ), "torus degree bound")


def nondeg_degree(f: LaurentPoly, p: int | None = None) -> int:
    """k! V_{M_J}(f): the degree of P(t) for nondegenerate f."""
    return torus_degree_bound(f, p)


def _saturated_face_volume(J: list[tuple[int, ...]], n: int, p: int) -> int:
    nz = [j for j in J if any(j)]
    if not nz:
        return 1
    P = NewtonPolytope(J, n)
    M = prime_to_p_saturation(nz, p)[0]
    return _integral(normalized_volume(P, M), "face volume")


def nu_terms(f: LaurentPoly, p: int | None = None) -> list[tuple[tuple[int, ...], int]]:
    """(A, (dim Delta(f_A))! V_{M_{J_A}}(f_A)) for every subset A of affine variables."""
    p = p or f.p
    out = []
    for A in affine_subsets(f):
        fA = restrict(f, A)
        out.append((A, 1 if fA.is_zero() else _saturated_face_volume(fA.support, f.nvars, p)))
    return out


def nu(f: LaurentPoly, p: int | None = None) -> Prediction:
    total = sum((-1) ** len(A) * v for A, v in nu_terms(f, p))
    notes = () if convenient(f) else ("hypothesis unmet: f is not convenient",)
    return Prediction("affine_degree", total, AFFINE_DEGREE, notes)


def nu_value(f: LaurentPoly, p: int | None = None) -> int:
    return nu(f, p).value  # type: ignore[return-value]


def restricted_lattices_agree(f: LaurentPoly, p: int | None = None) -> bool:
    """M_{J_A} == M_J cap R<J_A> for every A."""
    p = p or f.p
    nz = [j for j in f.support if any(j)]
    if not nz:
        return True
    MJ = prime_to_p_saturation(nz, p)[0]
    for A in affine_subsets(f):
        JA = [j for j in restrict(f, A).support if any(j)]
        if not JA:
            continue
        if prime_to_p_saturation(JA, p)[0] != intersect_span(MJ, JA):
            return False
    return True


def katz_degree(p: int, k: int, e: int, n: int) -> int:
    if e % p == 0 or k < 1:
        raise FormulaError("need k >= 1 and e prime to p")
    d = p**k * e
    return _integral(Fraction((d - 1) ** n + (-1) ** n * (p**k - 1), p**k), "diagonal closed form")


def dwork_degree(p: int, k: int, e: int, n: int) -> int:
    if e % p == 0 or k < 1:
        raise FormulaError("need k >= 1 and e prime to p")
    val = (p**k - 1) * Fraction(e) ** (n - 1) + Fraction((e - 1) ** n + (-1) ** n * (e - 1), e)
    return _integral(val, "Dwork closed form")


def cw_divisibility(polys: list[LaurentPoly], p: int | None = None, cap: int | None = None) -> dict[str, Prediction]:
    """Lower bounds on ord_q N(f_1, ..., f_s): mu - 1 (s = 1) and omega(F) - s."""
    p = p or polys[0].p
    s = len(polys)
    n = polys[0].nvars
    out: dict[str, Prediction] = {}
    if s == 1:
        try:
            m = mu(polys[0].support, p=p, cap=cap)
            out["mu"] = Prediction("divisibility", m - 1, CW_MU, (f"mu = {m}",))
        except SearchInconclusive as exc:
            out["mu"] = Prediction("divisibility", None, CW_MU, (f"inconclusive: {exc}",))
    # F = sum_i y_i f_i in n + s variables
    J = []
    for i, f in enumerate(polys):
        for j in f.support:
            J.append(tuple(j) + tuple(int(t == i) for t in range(s)))
    try:
        w = omega(J, p=p, cap=cap if cap is not None else n + s + 1)
        out["omega"] = Prediction("divisibility", w - s, CW_OMEGA, (f"omega(F) = {w}",))
    except SearchInconclusive as exc:
        out["omega"] = Prediction("divisibility", None, CW_OMEGA, (f"inconclusive: {exc}",))
    return out


def top_weight_count(f: LaurentPoly, p: int | None = None) -> Prediction:
    """Alternating sum over faces through the origin of (dim s)! V_{M_{J cap s}}(s)."""
    p = p or f.p
    P = NewtonPolytope(f.support, f.nvars)
    total = 0
    for face in faces_containing_origin(P):
        Js = P.face_points(face)
        if face.dim == 0:
            vol = 1
        else:
            sigma = NewtonPolytope(face.points(P), f.nvars)
            M = prime_to_p_saturation([j for j in Js if any(j)], p)[0]
            vol = _integral(normalized_volume(sigma, M), "face volume")
        total += (-1) ** (P.dim - face.dim) * vol
    return Prediction("top_weight_count", total, TOP_WEIGHT)


def origin_faces_are_restrictions(f: LaurentPoly) -> bool:
    """Every face through the origin equals Delta(f_A) for some A."""
    P = NewtonPolytope(f.support, f.nvars)
    shapes = set()
    for A in affine_subsets(f):
        fA = restrict(f, A)
        Q = NewtonPolytope(fA.support, f.nvars) if not fA.is_zero() else NewtonPolytope([], f.nvars)
        shapes.add(frozenset(Q.vertices))
    return all(frozenset(face.points(P)) in shapes for face in faces_containing_origin(P))


def _torus_factor_degrees(g: LaurentPoly, d: int, p: int) -> tuple[int, int]:
    """Numerator/denominator degree bounds for L(T^d, g)^{(-1)^{d-1}} = P^{delta^{d-k}}."""
    k = poly_dim(g)
    if g.is_zero() or k == 0:
        # psi(c) (q^m - 1)^d: 2^d linear factors split evenly; for d = 0 the inverse power leaves 1 - psi(c) t on top
        return (1, 0) if d == 0 else (2 ** (d - 1), 2 ** (d - 1))
    B = torus_degree_bound(g, p)
    j = d - k
    return (B, 0) if j == 0 else (2 ** (j - 1) * B, 2 ** (j - 1) * B)


def l_degree_bounds(f: LaurentPoly, p: int | None = None) -> tuple[int, int]:
    """Degree bounds (numerator, denominator) for L(T^k x A^{n-k}, f)^{(-1)^{n-1}},
    from the factorization over affine restrictions and the torus bound of each factor."""
    p = p or f.p
    n = f.nvars
    dn = dd = 0
    for A in affine_subsets(f):
        d = n - len(A)
        a, b = _torus_factor_degrees(restrict(f, A), d, p)
        if len(A) % 2:
            a, b = b, a
        dn, dd = dn + a, dd + b
    return dn, dd


def predictions(f: LaurentPoly, p: int | None = None) -> dict[str, Prediction]:
    p = p or f.p
    out = {
        "torus_degree_bound": Prediction("torus_degree_bound", torus_degree_bound(f, p), TORUS_BOUND),
        "affine_degree": nu(f, p),
        "top_weight_count": top_weight_count(f, p),
    }
    return out
