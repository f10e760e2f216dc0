"""Brute-force exponential sums and point counts over F_{q^m}.

The fast path works with discrete logarithms: a point is a vector of log
indices (plus a zero flag for affine coordinates), each monomial's value is
``exp[(log a + j . log x) mod (Q-1)]`` and the additive character only needs
the absolute trace, which is additive, so Tr(f(x)) is a sum of per-monomial
trace lookups.  Zero counting instead adds field elements, which gives an
independent route for the identity S_1(A^{n+s}, sum y_i f_i) = q^s N.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from itertools import product
from typing import Sequence

import numpy as np

from ..poly import LaurentPoly
from .cyclotomic import CyclotomicNumber
from .field import GF

DEFAULT_BUDGET = 10**8
CHUNK = 1 << 20


class BudgetExceeded(RuntimeError):
    pass


def _check_budget(points: int, budget: int | None):
    if budget is not None and points > budget:
        raise BudgetExceeded(f"{points} points exceed the budget of {budget}")


@dataclass
class SumReport:
    value: CyclotomicNumber
    histogram: list[int]
    p: int
    r: int
    m: int
    points: int
    seconds: float

    def to_json(self) -> dict:
        return {"m": self.m, "value": self.value.to_json(), "trace_histogram": self.histogram,
                "points": self.points, "seconds": round(self.seconds, 6)}


def _ranges(big: GF, torus: Sequence[bool]) -> list[int]:
    """Per-coordinate index range: torus coords are logs 0..Q-2, affine add a zero slot."""
    Q = big.order
    return [Q - 1 if t else Q for t in torus]


def _coords(idx: np.ndarray, sizes: Sequence[int]) -> list[np.ndarray]:
    out = []
    rest = idx
    for s in reversed(sizes):
        out.append(rest % s)
        rest = rest // s
    return out[::-1]


class _Prepared:
    """f lifted to F_{q^m}: coefficient logs and exponent matrix."""

    def __init__(self, f: LaurentPoly, big: GF, torus: Sequence[bool]):
        emb = big.embedding_from(f.field)
        self.big = big
        self.torus = list(torus)
        self.sizes = _ranges(big, torus)
        self.exps = np.array(list(f.terms), dtype=np.int64).reshape(len(f.terms), f.nvars)
        self.coef_log = np.array([big.log_table[emb[a]] for a in f.terms.values()], dtype=np.int64)
        for i, t in enumerate(torus):
            if not t and (self.exps[:, i] < 0).any():
                raise ValueError("negative exponent on an affine coordinate")

    def logs_and_masks(self, idx: np.ndarray):
        """Per-coordinate (log, is_zero) arrays for flat point indices."""
        out = []
        for c, t in zip(_coords(idx, self.sizes), self.torus):
            if t:
                out.append((c, None))
            else:
                out.append((c - 1, c == 0))
        return out

    def term_values(self, idx: np.ndarray):
        """For each monomial: (log of its value mod Q-1, mask where it vanishes)."""
        q1 = self.big.order - 1
        coords = self.logs_and_masks(idx)
        for row, cl in zip(self.exps, self.coef_log):
            lg = np.full(idx.shape, cl, dtype=np.int64)
            zero = np.zeros(idx.shape, dtype=bool)
            for e, (c, z) in zip(row, coords):
                if e:
                    lg = lg + int(e) * c
                    if z is not None:
                        zero |= z
            yield lg % q1, zero


def _chunks(total: int, size: int = CHUNK):
    for start in range(0, total, size):
        yield np.arange(start, min(total, start + size), dtype=np.int64)


def _trace_histogram_chunk(prep: _Prepared, idx: np.ndarray) -> np.ndarray:
    p = prep.big.p
    tr = prep.big.trace_by_log
    acc = np.zeros(idx.shape, dtype=np.int64)
    for lg, zero in prep.term_values(idx):
        t = tr[lg]
        t[zero] = 0
        acc += t
    return np.bincount(acc % p, minlength=p)


def _run_chunks(fn, total: int, threads: int):
    if threads <= 1:
        return [fn(idx) for idx in _chunks(total)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, _chunks(total)))


def exp_sum(f: LaurentPoly, m: int = 1, torus: Sequence[bool] | None = None,
            budget: int | None = DEFAULT_BUDGET, threads: int = 1) -> SumReport:
    """S_m over the product of T (torus flags) and A (affine) coordinates."""
    t0 = time.perf_counter()
    torus = list(f.torus if torus is None else torus)
    big = f.field.extension(m)
    prep = _Prepared(f, big, torus)
    total = int(np.prod(prep.sizes, dtype=object))
    _check_budget(total, budget)
    p = big.p
    if f.is_zero():
        hist = np.zeros(p, dtype=np.int64)
        hist[0] = total
    else:
        parts = _run_chunks(lambda idx: _trace_histogram_chunk(prep, idx), total, threads)
        hist = np.sum(parts, axis=0)
    hist = [int(x) for x in hist]
    return SumReport(CyclotomicNumber.from_histogram(p, hist), hist, p, f.field.degree, m, total,
                     time.perf_counter() - t0)


def sum_torus(f: LaurentPoly, m: int = 1, **kw) -> CyclotomicNumber:
    return exp_sum(f, m, [True] * f.nvars, **kw).value


def sum_affine(f: LaurentPoly, m: int = 1, **kw) -> CyclotomicNumber:
    return exp_sum(f, m, [False] * f.nvars, **kw).value


def sum_mixed(f: LaurentPoly, k: int, m: int = 1, **kw) -> CyclotomicNumber:
    """Sum over T^k x A^(n-k): the first k coordinates are toric."""
    return exp_sum(f, m, [i < k for i in range(f.nvars)], **kw).value


def _values_chunk(prep: _Prepared, idx: np.ndarray) -> np.ndarray:
    big = prep.big
    exp = big.exp_table
    acc = np.zeros(idx.shape, dtype=np.int64)
    for lg, zero in prep.term_values(idx):
        v = exp[lg]
        v[zero] = 0
        acc = big.add_vec(acc, v)
    return acc


def count_zeros(polys: Sequence[LaurentPoly], m: int = 1, torus: Sequence[bool] | None = None,
                budget: int | None = DEFAULT_BUDGET, threads: int = 1) -> int:
    """Common zeros in F_{q^m}^n (affine by default) of the given polynomials."""
    if not polys:
        raise ValueError("need at least one polynomial")
    f0 = polys[0]
    n = f0.nvars
    torus = [False] * n if torus is None else list(torus)
    big = f0.field.extension(m)
    sizes = _ranges(big, torus)
    total = int(np.prod(sizes, dtype=object))
    _check_budget(total, budget)
    preps = [_Prepared(f, big, torus) if not f.is_zero() else None for f in polys]

    def chunk(idx):
        ok = np.ones(idx.shape, dtype=bool)
        for prep in preps:
            if prep is not None:
                ok &= _values_chunk(prep, idx) == 0
        return int(ok.sum())

    return sum(_run_chunks(chunk, total, threads))


def count_points(f: LaurentPoly, m: int = 1, **kw) -> int:
    return count_zeros([f], m, **kw)


def reference_sum(f: LaurentPoly, m: int = 1, torus: Sequence[bool] | None = None) -> CyclotomicNumber:
    """Slow evaluator: loops over points and evaluates f with scalar field ops."""
    torus = list(f.torus if torus is None else torus)
    big = f.field.extension(m)
    p = big.p
    nonzero = list(range(1, big.order))
    everything = list(range(big.order))
    hist = [0] * p
    for pt in product(*[nonzero if t else everything for t in torus]):
        hist[big.absolute_trace_table[f.evaluate(pt, big)]] += 1
    return CyclotomicNumber.from_histogram(p, hist)


def reference_count(polys: Sequence[LaurentPoly], m: int = 1) -> int:
    big = polys[0].field.extension(m)
    n = polys[0].nvars
    return sum(1 for pt in product(range(big.order), repeat=n)
               if all(f.evaluate(pt, big) == 0 for f in polys))


def psi(x: int, big: GF) -> CyclotomicNumber:
    """zeta_p ** Tr(x), Tr the absolute trace of F_Q/F_p."""
    return CyclotomicNumber.zeta_power(big.p, int(big.absolute_trace_table[x]))
