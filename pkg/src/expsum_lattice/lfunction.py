"""L-series from power sums, rational reconstruction, the delta operator,
ord_q Newton polygons and archimedean weights of reciprocal roots."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import inf, log
from typing import Sequence

import mpmath

from .ff.cyclotomic import CyclotomicNumber, ord_zeta
from .polytope import HilbertData

Poly = list  # list of CyclotomicNumber, constant term first


class ReconstructionError(ArithmeticError):
    """No rational function within the degree bounds matches the series."""


class AmbiguousWeight(ArithmeticError):
    pass


def _cyc(p: int, x) -> CyclotomicNumber:
    return x if isinstance(x, CyclotomicNumber) else CyclotomicNumber.rational(p, x)


def _trim(a: Poly) -> Poly:
    a = list(a)
    while len(a) > 1 and not a[-1]:
        a.pop()
    return a


def poly_mul(a: Poly, b: Poly, p: int) -> Poly:
    out = [CyclotomicNumber.zero(p) for _ in range(len(a) + len(b) - 1)]
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] = out[i + j] + x * y
    return _trim(out)


def poly_scale_var(a: Poly, c: int) -> Poly:
    """a(c t)."""
    return [x * c**i for i, x in enumerate(a)]


def series_div(num: Poly, den: Poly, order: int, p: int) -> Poly:
    """num/den mod t^{order+1}; den(0) must be invertible."""
    inv0 = den[0].inverse()
    out = []
    for m in range(order + 1):
        s = num[m] if m < len(num) else CyclotomicNumber.zero(p)
        for j in range(1, min(m, len(den) - 1) + 1):
            s = s - den[j] * out[m - j]
        out.append(s * inv0)
    return out


# -- series ---------------------------------------------------------------------

@dataclass(frozen=True)
class LSeries:
    """exp(sum S_m t^m / m) truncated after t^M."""

    p: int
    coefficients: tuple[CyclotomicNumber, ...]

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    def inverse(self) -> "LSeries":
        one = [CyclotomicNumber.one(self.p)]
        return LSeries(self.p, tuple(series_div(one, list(self.coefficients), self.order, self.p)))

    def power(self, sign: int) -> "LSeries":
        return self if sign > 0 else self.inverse()

    def to_json(self) -> list:
        return [c.to_json() for c in self.coefficients]


def l_series(sums: Sequence, p: int) -> LSeries:
    """c_0 = 1, m c_m = sum_{j=1}^m S_j c_{m-j}."""
    S = [_cyc(p, s) for s in sums]
    c = [CyclotomicNumber.one(p)]
    for m in range(1, len(S) + 1):
        acc = CyclotomicNumber.zero(p)
        for j in range(1, m + 1):
            acc = acc + S[j - 1] * c[m - j]
        c.append(acc / m)
    return LSeries(p, tuple(c))


def power_sums(series: LSeries) -> list[CyclotomicNumber]:
    """Inverse of l_series: S_m = m c_m - sum_{j<m} S_j c_{m-j}."""
    c = series.coefficients
    S = []
    for m in range(1, series.order + 1):
        acc = c[m] * m
        for j in range(1, m):
            acc = acc - S[j - 1] * c[m - j]
        S.append(acc)
    return S


# -- rational functions --------------------------------------------------------------

@dataclass(frozen=True)
class RationalFn:
    p: int
    numerator: tuple[CyclotomicNumber, ...]
    denominator: tuple[CyclotomicNumber, ...]

    @classmethod
    def from_polys(cls, p: int, num: Sequence, den: Sequence = (1,)) -> "RationalFn":
        return cls(p, tuple(_trim([_cyc(p, x) for x in num])), tuple(_trim([_cyc(p, x) for x in den])))

    @property
    def degrees(self) -> tuple[int, int]:
        def deg(a):
            return -1 if len(a) == 1 and not a[0] else len(a) - 1
        return deg(self.numerator), deg(self.denominator)

    def series(self, order: int) -> LSeries:
        return LSeries(self.p, tuple(series_div(list(self.numerator), list(self.denominator), order, self.p)))

    def reciprocal(self) -> "RationalFn":
        return RationalFn(self.p, self.denominator, self.numerator)

    def __eq__(self, other):
        if not isinstance(other, RationalFn):
            return NotImplemented
        return poly_mul(list(self.numerator), list(other.denominator), self.p) == \
            poly_mul(list(other.numerator), list(self.denominator), self.p)

    def __hash__(self):
        return hash(self.degrees)

    def to_json(self) -> dict:
        return {"numerator": [c.to_json() for c in self.numerator],
                "denominator": [c.to_json() for c in self.denominator]}


def _solve(A: list[list[CyclotomicNumber]], b: list[CyclotomicNumber], p: int) -> list[CyclotomicNumber] | None:
    """A particular solution of A x = b over Q(zeta_p) (free variables 0), or None."""
    rows = [list(r) + [v] for r, v in zip(A, b)]
    ncols = len(A[0]) if A else 0
    piv_cols = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = rows[r][c].inverse()
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        piv_cols.append(c)
        r += 1
    if any(rows[i][ncols] for i in range(r, len(rows))):
        return None
    x = [CyclotomicNumber.zero(p) for _ in range(ncols)]
    for i, c in enumerate(piv_cols):
        x[c] = rows[i][ncols]
    return x


def pade(series: LSeries, dn: int, dd: int) -> RationalFn | None:
    """Exact fit num/den with den(0) = 1 through the whole truncation, or None."""
    p, c, M = series.p, series.coefficients, series.order
    zero = CyclotomicNumber.zero(p)

    def coef(i):
        return c[i] if 0 <= i <= M else zero

    eqs = list(range(dn + 1, M + 1))
    if dd:
        A = [[coef(m - j) for j in range(1, dd + 1)] for m in eqs]
        b = [-coef(m) for m in eqs]
        q = _solve(A, b, p) if eqs else [zero] * dd
        if q is None:
            return None
    else:
        if any(coef(m) for m in eqs):
            return None
        q = []
    den = [CyclotomicNumber.one(p)] + q
    num = []
    for i in range(dn + 1):
        s = zero
        for j in range(min(i, dd) + 1):
            s = s + den[j] * coef(i - j)
        num.append(s)
    return RationalFn(p, tuple(_trim(num)), tuple(_trim(den)))


def rational_reconstruct(series: LSeries, deg_num_max: int, deg_den_max: int, margin: int = 2) -> RationalFn:
    """Minimal-degree num/den matching the series; raises ReconstructionError."""
    if series.order < deg_num_max + deg_den_max + margin:
        raise ReconstructionError(
            f"truncation order {series.order} is below {deg_num_max} + {deg_den_max} + margin {margin}")
    pairs = sorted(((a, b) for a in range(deg_num_max + 1) for b in range(deg_den_max + 1)),
                   key=lambda ab: (ab[0] + ab[1], ab[1]))
    for a, b in pairs:
        r = pade(series, a, b)
        if r is not None:
            return r
    raise ReconstructionError(f"no rational fit within bounds ({deg_num_max}, {deg_den_max})")


def delta_op(g: RationalFn, q: int, times: int = 1) -> RationalFn:
    """g(t)/g(qt), iterated."""
    p = g.p
    for _ in range(times):
        num = poly_mul(list(g.numerator), poly_scale_var(list(g.denominator), q), p)
        den = poly_mul(list(g.denominator), poly_scale_var(list(g.numerator), q), p)
        g = RationalFn(p, tuple(num), tuple(den))
    return g


# -- Newton polygons ---------------------------------------------------------------------

@dataclass(frozen=True)
class NewtonPolygon:
    vertices: tuple[tuple[int, Fraction], ...]

    @property
    def length(self) -> int:
        return self.vertices[-1][0] - self.vertices[0][0]

    def slopes(self) -> list[Fraction]:
        out = []
        for (x0, y0), (x1, y1) in zip(self.vertices, self.vertices[1:]):
            out += [Fraction(y1 - y0, x1 - x0)] * (x1 - x0)
        return out

    def at(self, x: int) -> Fraction:
        for (x0, y0), (x1, y1) in zip(self.vertices, self.vertices[1:]):
            if x0 <= x <= x1:
                return y0 + (y1 - y0) * Fraction(x - x0, x1 - x0)
        if len(self.vertices) == 1 and x == self.vertices[0][0]:
            return self.vertices[0][1]
        raise ValueError(f"{x} is outside the polygon")

    def to_json(self) -> list:
        return [[x, str(y)] for x, y in self.vertices]


def lower_hull(points: Sequence[tuple[int, Fraction]]) -> NewtonPolygon:
    pts = sorted(points)
    hull: list[tuple[int, Fraction]] = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop hull[-1] if it lies on or above the segment hull[-2] -> pt
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    return NewtonPolygon(tuple(hull))


def newton_polygon_ordq(P: Sequence[CyclotomicNumber], r: int = 1) -> NewtonPolygon:
    """Lower convex hull of (i, ord_q c_i).  Rational coefficients are fine:
    the valuation of their denominators is accounted for exactly."""
    pts = []
    for i, c in enumerate(P):
        _, _, oq = ord_zeta(c, r)
        if oq != inf:
            pts.append((i, Fraction(oq)))
    if not pts:
        raise ValueError("zero polynomial")
    return lower_hull(pts)


def hodge_polygon(h: HilbertData) -> NewtonPolygon:
    """Slopes i/N with multiplicity a_i."""
    pts = [(0, Fraction(0))]
    x, y = 0, Fraction(0)
    for i, a in enumerate(h.a):
        if a:
            x += a
            y += Fraction(i, h.N) * a
            pts.append((x, y))
    return lower_hull(pts)


def polygon_dominates(actual: NewtonPolygon, bound: NewtonPolygon) -> bool:
    """actual lies on or above bound at every integer abscissa of the common range."""
    lo = max(actual.vertices[0][0], bound.vertices[0][0])
    hi = min(actual.vertices[-1][0], bound.vertices[-1][0])
    return all(actual.at(x) >= bound.at(x) for x in range(lo, hi + 1))


# -- archimedean weights --------------------------------------------------------------------

@dataclass(frozen=True)
class RootReport:
    weights: dict[int, int]
    moduli: tuple[float, ...]
    residuals: tuple[float, ...]
    relative_errors: tuple[float, ...]

    def to_json(self) -> dict:
        return {"weights": {str(k): v for k, v in sorted(self.weights.items())},
                "moduli": list(self.moduli), "residuals": list(self.residuals),
                "relative_errors": list(self.relative_errors)}


def reciprocal_roots(P: Sequence[CyclotomicNumber], prec: int = 128) -> list:
    """Complex reciprocal roots of P (zeta_p -> exp(2 pi i / p))."""
    P = _trim(list(P))
    if len(P) <= 1:
        return []
    with mpmath.workprec(prec):
        coeffs = [c.to_complex(dps=int(prec * 0.30103) + 10) for c in P]
        return list(mpmath.polyroots(coeffs, maxsteps=400, extraprec=2 * prec))


def root_moduli(P: Sequence[CyclotomicNumber], q: int, tolerance: float = 1e-3, prec: int = 128) -> RootReport:
    P = _trim(list(P))
    if len(P) <= 1:
        raise ValueError("constant polynomial has no reciprocal roots")
    roots = reciprocal_roots(P, prec)
    weights: dict[int, int] = {}
    moduli, residuals, rel = [], [], []
    with mpmath.workprec(prec):
        coeffs = [c.to_complex(dps=int(prec * 0.30103) + 10) for c in P]
        scale = max(abs(c) for c in coeffs)
        for rho in roots:
            mod = abs(rho)
            w = round(2 * float(mpmath.log(mod)) / log(q)) if mod > 0 else 0
            target = mpmath.mpf(q) ** (mpmath.mpf(w) / 2)
            err = float(abs(mod - target) / target)
            if err > tolerance:
                raise AmbiguousWeight(f"|rho| = {float(mod)} is not within {tolerance} of any q^(w/2)")
            d = len(coeffs) - 1
            res = abs(mpmath.fsum(c * rho ** (d - i) for i, c in enumerate(coeffs))) / (scale * max(1, mod) ** d)
            weights[w] = weights.get(w, 0) + 1
            moduli.append(float(mod))
            residuals.append(float(res))
            rel.append(err)
    return RootReport(weights, tuple(moduli), tuple(residuals), tuple(rel))
