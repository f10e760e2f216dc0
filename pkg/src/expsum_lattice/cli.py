"""Command line front end: ``expsum <command> POLY --p P [options]``.

Commands: lattice, reduce, polytope, invariants, nondeg, sums, lfunc, verify.
Exit codes: 0 pass, 1 prediction/measurement mismatch, 2 input error, 3 budget.
"""

from __future__ import annotations

import argparse
import json
import platform
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

import mpmath
import numpy as np

from . import __version__
from .ff.cyclotomic import CyclotomicNumber
from .ff.field import FieldError, get_field
from .ff.sums import BudgetExceeded, count_points
from .formulas import (AFFINE_DEGREE, CW_MU, CW_OMEGA, SUM_OMEGA, TOP_WEIGHT, TORUS_BOUND, FormulaError,
                       Prediction, cw_divisibility, l_degree_bounds, nu, nu_terms,
                       origin_faces_are_restrictions, restricted_lattices_agree, top_weight_count,
                       torus_degree_bound)
from .lattice import (LatticeError, dual_forms, lattice_from_spec, lattice_index,
                      prime_to_p_saturation, reduce_by_lattice, span_lattice)
from .lfunction import (AmbiguousWeight, hodge_polygon, newton_polygon_ordq,
                        polygon_dominates, root_moduli)
from .nondegeneracy import NondegError, is_nondegenerate, nondeg_via_reduction
from .parser import ParseError, format_poly, parse_poly
from .pipeline import (fit_series, measure_sums, ordq_table, projective_counts, sign, signed_sums,
                       undelta_sums, yf_identity, zeta_R)
from .poly import LaurentPoly
from .polytope import (NewtonPolytope, PolytopeError, SearchInconclusive, convenient, hilbert_numerator,
                       normalized_volume, omega, poly_dim)

EXIT_PASS, EXIT_MISMATCH, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3
MEASURED = "measured"
COMMANDS = ("lattice", "reduce", "polytope", "invariants", "nondeg", "sums", "lfunc", "verify")
INPUT_ERRORS = (ParseError, FieldError, LatticeError, PolytopeError, NondegError, FormulaError, ValueError,
                OSError)

DEFAULTS: dict[str, Any] = {
    "vars": None, "torus": None, "p": None, "r": 1, "modulus": None, "lattice": "MJ", "m_max": 3,
    "nondeg_m": 3, "budget": 10**8, "tolerance": 1e-3, "threads": 1, "num_deg": None, "den_deg": None,
    "projective": False, "cap": None, "count": False, "undelta": None,
}


class InputError(ValueError):
    pass


# -- JSON helpers -----------------------------------------------------------------------------

def jsonable(x):
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, int):
        return int(x)
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else str(x)
    if isinstance(x, float):
        return x
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, CyclotomicNumber):
        return x.to_json()
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if hasattr(x, "to_json"):
        return jsonable(x.to_json())
    return str(x)


def measured(value) -> dict:
    return {"value": jsonable(value), "provenance": MEASURED}


def predicted(pred: Prediction | Any, provenance: str | None = None) -> dict:
    if isinstance(pred, Prediction):
        return {"value": jsonable(pred.value), "provenance": pred.provenance, "notes": list(pred.notes)}
    return {"value": jsonable(pred), "provenance": provenance}


@dataclass
class Comparison:
    name: str
    predicted: Any
    measured: Any
    holds: bool | None  # None: hypotheses unmet or inconclusive
    provenance: str
    note: str = ""

    def to_json(self) -> dict:
        return {"name": self.name, "predicted": jsonable(self.predicted), "measured": jsonable(self.measured),
                "holds": self.holds, "provenance": self.provenance, "note": self.note}


@dataclass
class Report:
    command: str
    inputs: dict
    results: dict = field(default_factory=dict)
    comparisons: list[Comparison] = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    versions: dict = field(default_factory=dict)

    @property
    def mismatch(self) -> bool:
        return any(c.holds is False for c in self.comparisons)

    @property
    def status(self) -> str:
        return "mismatch" if self.mismatch else "pass"

    def to_json(self) -> dict:
        return {"command": self.command, "status": self.status, "inputs": jsonable(self.inputs),
                "results": jsonable(self.results), "comparisons": [c.to_json() for c in self.comparisons],
                "versions": self.versions, "timings": self.timings}

    def to_text(self) -> str:
        lines = [f"{self.command}: {self.status}"]

        def walk(obj, indent):
            pad = "  " * indent
            if isinstance(obj, dict):
                for k, v in obj.items():
                    if isinstance(v, (dict, list)) and v and not _flat(v):
                        lines.append(f"{pad}{k}:")
                        walk(v, indent + 1)
                    else:
                        lines.append(f"{pad}{k}: {_short(v)}")
            elif isinstance(obj, list):
                for v in obj:
                    if isinstance(v, (dict, list)) and not _flat(v):
                        lines.append(f"{pad}-")
                        walk(v, indent + 1)
                    else:
                        lines.append(f"{pad}- {_short(v)}")

        walk(jsonable(self.results), 1)
        for c in self.comparisons:
            mark = {True: "PASS", False: "FAIL", None: "SKIP"}[c.holds]
            lines.append(f"  [{mark}] {c.name}: predicted {_short(jsonable(c.predicted))}, "
                         f"measured {_short(jsonable(c.measured))} ({c.provenance}){' - ' + c.note if c.note else ''}")
        return "\n".join(lines)


def _flat(v) -> bool:
    if isinstance(v, dict):
        return all(not isinstance(x, (dict, list)) for x in v.values()) and len(v) <= 4
    return all(not isinstance(x, (dict, list)) for x in v) or (
        all(isinstance(x, list) and all(not isinstance(y, (dict, list)) for y in x) for x in v))


def _short(v) -> str:
    return json.dumps(v) if isinstance(v, (dict, list)) else str(v)


def versions() -> dict:
    return {"expsum_lattice": __version__, "python": platform.python_version(), "numpy": np.__version__,
            "mpmath": mpmath.__version__}


# -- input resolution ------------------------------------------------------------------------------

def _split_list(s) -> list[str] | None:
    if s is None:
        return None
    if isinstance(s, (list, tuple)):
        return [str(x) for x in s]
    return [t.strip() for t in str(s).split(",") if t.strip()]


def read_basis_file(path: str | Path) -> list[list[int]]:
    """One basis row per line, space-separated integers; blank lines and '#' comments ignored."""
    rows = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            rows.append([int(t) for t in line.split()])
        except ValueError:
            raise InputError(f"{path}:{lineno}: expected space-separated integers") from None
    if not rows:
        raise InputError(f"{path}: no basis rows")
    if len({len(r) for r in rows}) != 1:
        raise InputError(f"{path}: rows have different lengths")
    return rows


@dataclass
class Context:
    f: LaurentPoly
    opts: dict

    @property
    def p(self) -> int:
        return self.f.p

    @property
    def r(self) -> int:
        return self.f.field.degree

    @property
    def q(self) -> int:
        return self.f.field.order

    @property
    def J(self) -> list[tuple[int, ...]]:
        return [j for j in self.f.support if any(j)]

    def lattice(self):
        kind = self.opts["lattice"]
        if kind in ("MJ", "ZJ", "ambient"):
            return lattice_from_spec(kind, self.J, self.p)
        rows = read_basis_file(kind)
        M = lattice_from_spec("custom", self.J, self.p, rows)
        if M.ambient_dim != self.f.nvars:
            raise InputError(f"basis rows have length {M.ambient_dim}, expected {self.f.nvars}")
        return M


def build_context(poly: str, opts: dict) -> Context:
    o = dict(DEFAULTS)
    o.update({k: v for k, v in opts.items() if v is not None or k not in DEFAULTS})
    if o["p"] is None:
        raise InputError("--p is required")
    modulus = None
    if o["modulus"] is not None:
        try:
            modulus = [int(c) for c in _split_list(o["modulus"])]
        except ValueError:
            raise InputError("--modulus must be a comma-separated integer list (constant term first)") from None
    r = int(o["r"]) if modulus is None else len(modulus) - 1
    if modulus is not None and o["r"] not in (None, 1, r):
        raise InputError(f"--r {o['r']} disagrees with the modulus degree {r}")
    field_ = get_field(int(o["p"]), r, tuple(modulus) if modulus else None)
    names = _split_list(o["vars"])
    torus = o["torus"]
    if torus in (None, "", "none"):
        torus_arg: Any = False
    elif torus == "all":
        torus_arg = True
    else:
        torus_arg = _split_list(torus)
    f = parse_poly(poly, names, field_, torus_arg)
    if f.is_zero():
        raise InputError("the polynomial is zero")
    o["p"], o["r"] = field_.p, r
    return Context(f, o)


# -- commands ------------------------------------------------------------------------------------------

def cmd_lattice(ctx: Context, rep: Report) -> None:
    J, p = ctx.J, ctx.p
    ZJ, amb = span_lattice(J)
    MJ, split = prime_to_p_saturation(J, p)
    M = ctx.lattice()
    rep.results.update({
        "Z<J>": ZJ.to_json(), "M_J": MJ.to_json(), "ambient": amb.to_json(),
        "index_ambient_ZJ": measured(lattice_index(ZJ, amb, p)),
        "index_ambient_MJ": measured(lattice_index(MJ, amb, p)),
        "index_MJ_ZJ": measured(lattice_index(ZJ, MJ, p)),
        "selected": {"kind": ctx.opts["lattice"], **M.to_json()},
        "dual_forms": [ell.to_json() for ell in dual_forms(M, p)],
    })
    ok = lattice_index(MJ, amb, p).e == 1 and lattice_index(ZJ, MJ, p).a == 0
    rep.comparisons.append(Comparison("index p-part split", "[amb:M_J] = p^a, [M_J:Z<J>] prime to p",
                                      {"amb:M_J": lattice_index(MJ, amb, p), "M_J:Z<J>": lattice_index(ZJ, MJ, p)},
                                      ok, "prime-to-p saturation"))


def cmd_reduce(ctx: Context, rep: Report) -> None:
    M = ctx.lattice()
    red = reduce_by_lattice(ctx.f, M)
    rep.results["reduction"] = red.to_json()
    rep.results["g_nvars"] = red.k
    rep.comparisons.append(Comparison("round trip", format_poly(ctx.f), format_poly(red.expand()),
                                      red.expand().terms == ctx.f.terms, "p-power reduction"))


def cmd_polytope(ctx: Context, rep: Report) -> None:
    f = ctx.f
    P = NewtonPolytope(f.support, f.nvars)
    M = ctx.lattice()
    faces = []
    for face in P.faces:
        faces.append({"dim": face.dim, "contains_origin": face.contains_origin,
                      "vertices": [list(v) for v in face.points(P)]})
    rep.results["polytope"] = P.to_json()
    rep.results["faces"] = faces
    rep.results["normalized_volume"] = measured(normalized_volume(P, M))
    h = hilbert_numerator(P, M)
    rep.results["hilbert"] = h.to_json()
    rep.comparisons.append(Comparison("sum a_i = dim! V_M", normalized_volume(P, M), h.total, h.total == normalized_volume(P, M),
                                      "Hilbert numerator"))


def _mu_omega(ctx: Context) -> dict:
    f, out = ctx.f, {}
    if any(ctx.f.torus) or not f.is_polynomial():
        return out
    cap = ctx.opts["cap"]
    cw = cw_divisibility([f], ctx.p, cap)
    out["chevalley_warning"] = {k: v.to_json() for k, v in cw.items()}
    try:
        out["omega"] = predicted(omega(f, p=ctx.p, cap=cap), SUM_OMEGA)
    except SearchInconclusive as exc:
        out["omega"] = {"value": None, "provenance": SUM_OMEGA, "notes": [f"inconclusive: {exc}"]}
    return out


def cmd_invariants(ctx: Context, rep: Report) -> None:
    f, p = ctx.f, ctx.p
    rep.results["torus_degree_bound"] = predicted(torus_degree_bound(f, p), TORUS_BOUND)
    rep.results["dim"] = poly_dim(f)
    rep.results["convenient"] = convenient(f)
    if f.affine_indices():
        rep.results["nu"] = predicted(nu(f, p))
        rep.results["nu_terms"] = [{"A": list(A), "volume": v} for A, v in nu_terms(f, p)]
        rep.results["restricted_lattices_agree"] = restricted_lattices_agree(f, p)
    rep.results["top_weight_count"] = predicted(top_weight_count(f, p))
    rep.results["origin_faces_are_restrictions"] = origin_faces_are_restrictions(f)
    dn, dd = l_degree_bounds(f, p)
    rep.results["l_degree_bounds"] = predicted({"numerator": dn, "denominator": dd}, TORUS_BOUND)
    rep.results.update(_mu_omega(ctx))


def _nondeg(ctx: Context, rep: Report, f: LaurentPoly | None = None, label: str = "nondeg"):
    f = f or ctx.f
    M = ctx.lattice() if f is ctx.f else prime_to_p_saturation([j for j in f.support if any(j)], f.p)[0]
    t0 = time.perf_counter()
    direct = is_nondegenerate(f, M, ctx.opts["nondeg_m"], ctx.opts["budget"])
    via = nondeg_via_reduction(f, M, ctx.opts["nondeg_m"], ctx.opts["budget"])
    rep.timings[label] = time.perf_counter() - t0
    rep.results[label] = {"direct": direct.to_json(), "reduction": via.to_json()}
    rep.comparisons.append(Comparison(f"{label}: direct vs reduction", direct.status.value, via.status.value,
                                      direct.status == via.status, "p-power reduction invariance"))
    return direct


def cmd_nondeg(ctx: Context, rep: Report) -> None:
    _nondeg(ctx, rep)


def cmd_sums(ctx: Context, rep: Report) -> None:
    f = ctx.f
    t0 = time.perf_counter()
    reports = measure_sums(f, ctx.opts["m_max"], ctx.opts["budget"], ctx.opts["threads"])
    rep.timings["sums"] = time.perf_counter() - t0
    ords = ordq_table([s.value for s in reports], ctx.r)
    rep.results["sums"] = [{"m": s.m, "S": measured(s.value), "ord_q": measured(o), "points": s.points,
                            "complex": measured(_complex(s.value))} for s, o in zip(reports, ords)]
    rep.results["domain"] = ["T" if t else "A" for t in f.torus]
    if ctx.opts["count"]:
        if any(f.torus):
            raise InputError("--count needs affine variables only")
        rep.results["counts"] = [measured(count_points(f, m, budget=ctx.opts["budget"], threads=ctx.opts["threads"]))
                                 for m in range(1, ctx.opts["m_max"] + 1)]


def _complex(x: CyclotomicNumber) -> list[float]:
    z = complex(x.to_complex(30))
    return [z.real, z.imag]


def _roots(poly, q: int, tol: float) -> dict:
    try:
        if len(poly) <= 1:
            return {"weights": {}, "moduli": [], "residuals": []}
        return root_moduli(poly, q, tol).to_json()
    except AmbiguousWeight as exc:
        return {"error": str(exc)}


def _bounds(ctx: Context, default: tuple[int, int]) -> tuple[int, int]:
    dn = ctx.opts["num_deg"] if ctx.opts["num_deg"] is not None else default[0]
    dd = ctx.opts["den_deg"] if ctx.opts["den_deg"] is not None else default[1]
    return int(dn), int(dd)


def cmd_lfunc(ctx: Context, rep: Report) -> None:
    if ctx.opts["projective"]:
        _projective(ctx, rep, verify=False)
        return
    f, q, tol = ctx.f, ctx.q, ctx.opts["tolerance"]
    t0 = time.perf_counter()
    reports = measure_sums(f, ctx.opts["m_max"], ctx.opts["budget"], ctx.opts["threads"])
    rep.timings["sums"] = time.perf_counter() - t0
    S = signed_sums([s.value for s in reports], f.nvars)
    j = ctx.opts["undelta"]
    if j:
        S = undelta_sums(S, q, int(j))
    fit = fit_series(S, ctx.p, _bounds(ctx, l_degree_bounds(f, ctx.p)))
    rep.results["exponent_sign"] = sign(f.nvars)
    rep.results["undelta"] = int(j or 0)
    rep.results["fit"] = fit.to_json()
    if fit.rational is not None:
        R = fit.rational
        for side, poly in (("numerator", R.numerator), ("denominator", R.denominator)):
            rep.results[f"{side}_newton_polygon"] = measured(newton_polygon_ordq(poly, ctx.r))
            rep.results[f"{side}_roots"] = _roots(poly, q, tol)


# -- verify ------------------------------------------------------------------------------------------

def _weights_comparisons(rep: Report, poly, q: int, tol: float, dim: int, twc: int, all_top: bool, what: str):
    try:
        rr = root_moduli(poly, q, tol) if len(poly) > 1 else None
    except AmbiguousWeight as exc:
        rep.comparisons.append(Comparison(f"{what}: weights", "integral weights", str(exc), False, TOP_WEIGHT))
        return
    weights = rr.weights if rr else {}
    rep.results[f"{what}_roots"] = rr.to_json() if rr else {"weights": {}}
    top = weights.get(dim, 0)
    rep.comparisons.append(Comparison(f"{what}: roots of weight {dim}", twc, top, top == twc, TOP_WEIGHT))
    if all_top:
        rep.comparisons.append(Comparison(f"{what}: purity", {dim: len(poly) - 1}, weights,
                                          set(weights) <= {dim}, TOP_WEIGHT,
                                          "every face through the origin is a restriction"))


def _affine_checks(ctx: Context, rep: Report, sums) -> None:
    f, p, r = ctx.f, ctx.p, ctx.r
    budget, threads = ctx.opts["budget"], ctx.opts["threads"]
    counts = [count_points(f, m, budget=budget, threads=threads) for m in range(1, ctx.opts["m_max"] + 1)]
    rep.results["counts"] = [measured(c) for c in counts]
    cw = cw_divisibility([f], p, ctx.opts["cap"])
    for key, pred in cw.items():
        prov = CW_MU if key == "mu" else CW_OMEGA
        for m, N in enumerate(counts, start=1):
            qm = ctx.q**m
            o = _ord_int(N, qm)
            holds = None if pred.value is None else (o >= pred.value)
            rep.comparisons.append(Comparison(f"ord N over F_q^{m} ({key})", pred.value, o, holds, prov,
                                              "; ".join(pred.notes)))
    try:
        w = omega(f, p=p, cap=ctx.opts["cap"])
    except SearchInconclusive as exc:
        rep.comparisons.append(Comparison("ord S_m >= omega", None, None, None, SUM_OMEGA, str(exc)))
        return
    for m, o in enumerate(ordq_table(sums, r), start=1):
        holds = True if o is None else o >= w
        rep.comparisons.append(Comparison(f"ord S_{m} >= omega", w, "inf" if o is None else o, holds, SUM_OMEGA))


def _ord_int(N: int, qm: int) -> Fraction | str:
    """ord_{qm} of an integer (qm a prime power)."""
    if N == 0:
        return "inf"
    p = min(d for d in range(2, qm + 1) if qm % d == 0)
    k = 0
    while qm % p == 0:
        qm //= p
        k += 1
    v = 0
    while N % p == 0:
        N //= p
        v += 1
    return Fraction(v, k)


def cmd_verify(ctx: Context, rep: Report) -> None:
    if ctx.opts["projective"]:
        _projective(ctx, rep, verify=True)
        return
    f, p, q, tol = ctx.f, ctx.p, ctx.q, ctx.opts["tolerance"]
    n, dim = f.nvars, poly_dim(f)
    cmd_lattice(ctx, rep)
    cmd_invariants(ctx, rep)
    t0 = time.perf_counter()
    reports = measure_sums(f, ctx.opts["m_max"], ctx.opts["budget"], ctx.opts["threads"])
    rep.timings["sums"] = time.perf_counter() - t0
    sums = [s.value for s in reports]
    rep.results["sums"] = [measured(s) for s in sums]
    if not any(f.torus) and f.is_polynomial():
        _affine_checks(ctx, rep, sums)

    S = signed_sums(sums, n)
    bounds = _bounds(ctx, l_degree_bounds(f, p))
    fit = fit_series(S, p, bounds)
    rep.results["l_fit"] = fit.to_json()
    rep.comparisons.append(Comparison("rational L-function within formula bounds", fit.bounds,
                                      None if fit.rational is None else fit.rational.degrees,
                                      (fit.rational is not None) or (None if fit.clipped else False), TORUS_BOUND,
                                      fit.error or ""))
    if fit.rational is not None and all(f.torus):
        deg = fit.rational.degrees[0] - fit.rational.degrees[1]
        bound = torus_degree_bound(f, p)
        rep.comparisons.append(Comparison("0 <= deg L <= torus bound", bound, deg, 0 <= deg <= bound, TORUS_BOUND))

    if not convenient(f):
        rep.comparisons.append(Comparison("nondegenerate structure", None, None, None, AFFINE_DEGREE,
                                          "hypothesis unmet: f is not convenient"))
        return
    verdict = _nondeg(ctx, rep)
    if verdict.degenerate:
        rep.comparisons.append(Comparison("nondegenerate structure", None, None, None, AFFINE_DEGREE,
                                          "hypothesis unmet: f is degenerate"))
        return
    nu_v = nu(f, p).value
    twc = top_weight_count(f, p).value
    Sq = undelta_sums(S, q, n - dim)
    qfit = fit_series(Sq, p, (nu_v, 0))
    rep.results["Q_fit"] = qfit.to_json()
    ok = qfit.rational is not None and qfit.rational.degrees == (nu_v, 0)
    rep.comparisons.append(Comparison("Q(t) is a polynomial of degree nu", nu_v,
                                      None if qfit.rational is None else qfit.rational.degrees,
                                      ok if not qfit.clipped or ok else None, AFFINE_DEGREE, qfit.error or ""))
    if not ok:
        return
    Q = qfit.rational.numerator
    _weights_comparisons(rep, Q, q, tol, dim, twc, origin_faces_are_restrictions(f), "Q")
    if all(f.torus) and nu_v > 0:
        M = prime_to_p_saturation(ctx.J, p)[0]
        h = hilbert_numerator(NewtonPolytope(f.support, n), M)
        NP, HP = newton_polygon_ordq(Q, ctx.r), hodge_polygon(h)
        rep.results["newton_polygon"] = measured(NP)
        rep.results["hodge_polygon"] = predicted(HP.to_json(), "Hodge bound from the Hilbert numerator")
        rep.comparisons.append(Comparison("Newton polygon above Hodge polygon", HP.to_json(), NP.to_json(),
                                          polygon_dominates(NP, HP), "Hodge bound from the Hilbert numerator"))


def _projective(ctx: Context, rep: Report, verify: bool) -> None:
    f, p, q, tol = ctx.f, ctx.p, ctx.q, ctx.opts["tolerance"]
    n = f.nvars
    if any(f.torus):
        raise InputError("projective mode needs affine variables")
    terms = {tuple(j) + (1,): c for j, c in f.terms.items()}
    yf = LaurentPoly.from_terms(terms, f.field, tuple(f.names) + ("y",), [False] * n + [True])
    rep.results["yf"] = format_poly(yf)
    nu_v = nu(yf, p).value
    twc = top_weight_count(yf, p).value
    rep.results["nu_yf"] = predicted(nu(yf, p))
    rep.results["top_weight_count_yf"] = predicted(top_weight_count(yf, p))
    t0 = time.perf_counter()
    counts = projective_counts(f, ctx.opts["m_max"], ctx.opts["budget"], ctx.opts["threads"])
    rep.timings["counts"] = time.perf_counter() - t0
    rep.results["projective_counts"] = [measured(c) for c in counts]
    fit = zeta_R(counts, q, n, p, _bounds(ctx, (nu_v, 0)))
    rep.results["R_fit"] = fit.to_json()
    if fit.rational is not None:
        R = fit.rational
        for side, poly in (("numerator", R.numerator), ("denominator", R.denominator)):
            rep.results[f"R_{side}_roots"] = _roots(poly, q, tol)
    if not verify:
        return
    for m in range(1, min(2, ctx.opts["m_max"]) + 1):
        S, rhs = yf_identity(f, m, ctx.opts["budget"])
        rep.comparisons.append(Comparison(f"S_{m}(A^n x T, yf) = q^m N - q^(mn)", rhs, S,
                                          S == CyclotomicNumber.rational(p, rhs), "point count identity"))
    conv = convenient(yf)
    verdict = _nondeg(ctx, rep, yf, "nondeg_yf") if conv else None
    if not conv or verdict.degenerate:
        rep.comparisons.append(Comparison("R(t) structure", None, None, None, AFFINE_DEGREE,
                                          "hypothesis unmet: yf is " + ("not convenient" if not conv else "degenerate")))
        return
    ok = fit.rational is not None and fit.rational.degrees == (nu_v, 0)
    rep.comparisons.append(Comparison("R(t) is a polynomial of degree nu(yf)", nu_v,
                                      None if fit.rational is None else fit.rational.degrees,
                                      ok if (ok or not fit.clipped) else None, AFFINE_DEGREE, fit.error or ""))
    if ok:
        # Q(t) = R(qt) has top weight n, so R has top weight n - 2
        _weights_comparisons(rep, fit.rational.numerator, q, tol, n - 2, twc,
                             origin_faces_are_restrictions(yf), "R")


HANDLERS = {
    "lattice": cmd_lattice, "reduce": cmd_reduce, "polytope": cmd_polytope, "invariants": cmd_invariants,
    "nondeg": cmd_nondeg, "sums": cmd_sums, "lfunc": cmd_lfunc, "verify": cmd_verify,
}


def run(command: str, poly: str, **options) -> Report:
    """Run one command; raises module errors (see ``main`` for the exit-code mapping)."""
    if command not in HANDLERS:
        raise InputError(f"unknown command {command!r}")
    t0 = time.perf_counter()
    ctx = build_context(poly, options)
    echo = {"poly": poly, "parsed": format_poly(ctx.f), "variables": list(ctx.f.names),
            "torus": [n for n, t in zip(ctx.f.names, ctx.f.torus) if t], "p": ctx.p, "r": ctx.r,
            "modulus": list(ctx.f.field.modulus)}
    echo.update({k: ctx.opts[k] for k in ("lattice", "m_max", "nondeg_m", "budget", "tolerance", "num_deg",
                                          "den_deg", "projective", "cap", "undelta")})
    rep = Report(command, echo, versions=versions())
    HANDLERS[command](ctx, rep)
    rep.timings["total"] = time.perf_counter() - t0
    return rep


# -- argparse ------------------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="expsum", description="Exponential sums, Newton polytopes and lattices.")
    sub = ap.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("poly", help="polynomial text, e.g. 'x1*x2^2 + x2*x3^2 + x1^2*x3'")
    common.add_argument("--p", type=int, required=True, help="characteristic")
    common.add_argument("--r", type=int, default=1, help="q = p^r")
    common.add_argument("--modulus", help="field modulus coefficients, constant term first, e.g. 1,1,1")
    common.add_argument("--vars", help="comma-separated variable order (default: inferred)")
    common.add_argument("--torus", help="comma-separated torus variables, or 'all'")
    common.add_argument("--lattice", default="MJ", help="MJ, ZJ, ambient, or a basis-matrix file")
    common.add_argument("--m-max", dest="m_max", type=int, default=3, help="largest extension degree m")
    common.add_argument("--nondeg-m", dest="nondeg_m", type=int, default=3,
                        help="largest extension degree searched for degeneracy witnesses")
    common.add_argument("--budget", type=float, default=1e8, help="max points enumerated per sum")
    common.add_argument("--tolerance", type=float, default=1e-3, help="relative tolerance for weights")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--num-deg", dest="num_deg", type=int, help="numerator degree bound override")
    common.add_argument("--den-deg", dest="den_deg", type=int, help="denominator degree bound override")
    common.add_argument("--undelta", type=int, help="lfunc: strip delta^j before reconstructing")
    common.add_argument("--projective", action="store_true",
                        help="lfunc/verify: treat f as a homogeneous form and factor its zeta function")
    common.add_argument("--cap", type=int, help="dilation cap for the mu/omega searches")
    common.add_argument("--count", action="store_true", help="sums: also count affine zeros")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="format", action="store_const", const="json", default="json")
    fmt.add_argument("--text", dest="format", action="store_const", const="text")
    helps = {
        "lattice": "Z<J>, M_J, ambient lattice and indices", "reduce": "p-power reduction",
        "polytope": "Newton polytope, faces, volume, Hilbert numerator", "invariants": "mu, omega, nu, bounds",
        "nondeg": "nondegeneracy verdict (direct and via reduction)", "sums": "table of S_m",
        "lfunc": "reconstruct the L-function, polygons, root weights", "verify": "predict, measure, compare",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_PASS
    opts = {k: v for k, v in vars(ns).items() if k not in ("command", "poly", "format")}
    opts["budget"] = int(opts["budget"])
    try:
        rep = run(ns.command, ns.poly, **opts)
    except BudgetExceeded as exc:
        _error(ns, "budget", exc)
        return EXIT_BUDGET
    except (InputError, *INPUT_ERRORS) as exc:
        _error(ns, type(exc).__module__.rsplit(".", 1)[-1], exc)
        return EXIT_INPUT
    print(rep.to_text() if ns.format == "text" else json.dumps(rep.to_json(), indent=2))
    return EXIT_MISMATCH if rep.mismatch else EXIT_PASS


def _error(ns, module: str, exc: Exception) -> None:
    payload = {"command": ns.command, "status": "error", "error": {"module": module, "type": type(exc).__name__,
                                                                    "message": str(exc)}}
    if ns.format == "text":
        print(f"error [{module}] {type(exc).__name__}: {exc}", file=sys.stderr)
    else:
        print(json.dumps(payload, indent=2))


if __name__ == "__main__":
    sys.exit(main())
