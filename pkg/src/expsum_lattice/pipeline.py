"""Measured side of the experiments: sums -> L-series -> rational functions,
projective zeta functions, and the prediction/measurement comparison."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .ff.cyclotomic import CyclotomicNumber, ord_zeta
from .ff.sums import DEFAULT_BUDGET, SumReport, count_points, exp_sum
from .lfunction import (LSeries, RationalFn, ReconstructionError, l_series, poly_mul,
                        rational_reconstruct)
from .poly import LaurentPoly

MARGIN = 2


def sign(n: int) -> int:
    return -1 if (n - 1) % 2 else 1


def measure_sums(f: LaurentPoly, m_max: int, budget: int | None = DEFAULT_BUDGET,
                 threads: int = 1) -> list[SumReport]:
    """S_1..S_{m_max} over T^k x A^{n-k} as given by f's torus flags."""
    return [exp_sum(f, m, budget=budget, threads=threads) for m in range(1, m_max + 1)]


def signed_sums(sums: Sequence[CyclotomicNumber], n: int) -> list[CyclotomicNumber]:
    """Power sums of L^{(-1)^{n-1}}."""
    return [s * sign(n) for s in sums]


def undelta_sums(sums: Sequence[CyclotomicNumber], q: int, j: int) -> list[CyclotomicNumber]:
    """Power sums of Q from those of Q^{delta^j}: S_m(Q^{delta^j}) = (1 - q^m)^j S_m(Q)."""
    return [s / (1 - q**m) ** j for m, s in enumerate(sums, start=1)]


def clip_bounds(bounds: tuple[int, int], order: int, margin: int = MARGIN) -> tuple[tuple[int, int], bool]:
    """Shrink (dn, dd) so that dn + dd + margin <= order; report whether clipping happened."""
    dn, dd = bounds
    room = order - margin
    if dn + dd <= room:
        return (dn, dd), False
    if room < 0:
        raise ReconstructionError(f"truncation order {order} leaves no room for margin {margin}")
    dd2 = min(dd, room // 2) if dn else min(dd, room)
    dn2 = min(dn, room - dd2)
    dd2 = min(dd, room - dn2)
    return (dn2, dd2), True


@dataclass
class LFit:
    series: LSeries
    bounds: tuple[int, int]
    clipped: bool
    rational: RationalFn | None = None
    error: str | None = None
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"bounds": list(self.bounds), "clipped": self.clipped,
                "rational": None if self.rational is None else self.rational.to_json(),
                "degrees": None if self.rational is None else list(self.rational.degrees),
                "error": self.error, "notes": self.notes}


def fit_series(power_sums: Sequence[CyclotomicNumber], p: int, bounds: tuple[int, int],
               margin: int = MARGIN) -> LFit:
    series = l_series(power_sums, p)
    b, clipped = clip_bounds(bounds, series.order, margin)
    fit = LFit(series, b, clipped)
    if clipped:
        fit.notes.append(f"bounds {tuple(bounds)} clipped to {b} by the truncation order {series.order}")
    try:
        fit.rational = rational_reconstruct(series, b[0], b[1], margin)
    except ReconstructionError as exc:
        fit.error = str(exc)
    return fit


def ordq_table(sums: Sequence[CyclotomicNumber], r: int) -> list[Fraction | None]:
    """ord_{q^m} S_m, None for S_m = 0."""
    out = []
    for m, s in enumerate(sums, start=1):
        _, _, o = ord_zeta(s, r * m)
        out.append(None if not s else o)
    return out


# -- projective hypersurfaces ------------------------------------------------------------

def projective_counts(f: LaurentPoly, m_max: int, budget: int | None = DEFAULT_BUDGET,
                      threads: int = 1) -> list[int]:
    """#X(F_{q^m}) for the hypersurface f = 0 in P^{n-1} (f homogeneous)."""
    degs = {sum(j) for j in f.support}
    if len(degs) != 1:
        raise ValueError("projective point counts need a homogeneous polynomial")
    q = f.field.order
    out = []
    for m in range(1, m_max + 1):
        Na = count_points(f.with_torus(False), m, budget=budget, threads=threads)
        out.append((Na - 1) // (q**m - 1))
    return out


def zeta_R_sums(counts: Sequence[int], q: int, n: int, p: int) -> list[CyclotomicNumber]:
    """Power sums of R(t) where Z(t) = R^{(-1)^{n-1}} / prod_{i<=n-2} (1 - q^i t)."""
    out = []
    for m, N in enumerate(counts, start=1):
        # log Z = sum N_m t^m/m; log prod (1-q^i t)^{-1} has power sums sum_i q^{i m}
        s = N - sum(q ** (i * m) for i in range(n - 1))
        out.append(CyclotomicNumber.rational(p, s * sign(n)))
    return out


def zeta_R(counts: Sequence[int], q: int, n: int, p: int, bounds: tuple[int, int],
           margin: int = MARGIN) -> LFit:
    return fit_series(zeta_R_sums(counts, q, n, p), p, bounds, margin)


def yf_identity(f: LaurentPoly, m: int, budget: int | None = DEFAULT_BUDGET) -> tuple[CyclotomicNumber, int]:
    """(S_m(A^n x T, y f), q^m N_aff - q^{mn}); the two must agree."""
    n = f.nvars
    terms = {tuple(j) + (1,): c for j, c in f.terms.items()}
    yf = LaurentPoly.from_terms(terms, f.field, tuple(f.names) + ("y",), [False] * n + [True])
    S = exp_sum(yf, m, budget=budget).value
    q = f.field.order
    Na = count_points(f.with_torus(False), m, budget=budget)
    return S, q**m * Na - q ** (m * n)


def series_product(a: RationalFn, b: RationalFn) -> RationalFn:
    p = a.p
    return RationalFn(p, tuple(poly_mul(list(a.numerator), list(b.numerator), p)),
                      tuple(poly_mul(list(a.denominator), list(b.denominator), p)))
