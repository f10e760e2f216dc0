"""Exact arithmetic in Q(zeta_p) on the basis 1, zeta, ..., zeta^(p-2)."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd, inf, lcm
from typing import Iterable, Sequence

from .._linalg import p_adic_valuation


def _reduce_full(p: int, full: Sequence) -> tuple[Fraction, ...]:
    """Coefficients of zeta^0..zeta^(p-1) -> canonical basis (drop zeta^(p-1))."""
    top = full[p - 1]
    return tuple(Fraction(full[i]) - top for i in range(p - 1))


class CyclotomicNumber:
    __slots__ = ("p", "c")

    def __init__(self, p: int, coeffs: Iterable = ()):
        c = [Fraction(x) for x in coeffs]
        if len(c) > p - 1:
            full = [Fraction(0)] * p
            for i, x in enumerate(c):
                full[i % p] += x
            c = list(_reduce_full(p, full))
        c += [Fraction(0)] * (p - 1 - len(c))
        self.p = p
        self.c = tuple(c)

    # -- constructors -----------------------------------------------------------

    @classmethod
    def zero(cls, p: int) -> "CyclotomicNumber":
        return cls(p)

    @classmethod
    def one(cls, p: int) -> "CyclotomicNumber":
        return cls(p, [1])

    @classmethod
    def rational(cls, p: int, x) -> "CyclotomicNumber":
        return cls(p, [x])

    @classmethod
    def zeta_power(cls, p: int, k: int) -> "CyclotomicNumber":
        full = [0] * p
        full[k % p] = 1
        return cls(p, _reduce_full(p, full))

    @classmethod
    def from_histogram(cls, p: int, counts: Sequence[int]) -> "CyclotomicNumber":
        """sum_t counts[t] * zeta^t for t = 0..p-1."""
        full = [int(x) for x in counts] + [0] * (p - len(counts))
        return cls(p, _reduce_full(p, full))

    # -- arithmetic ---------------------------------------------------------

    def _lift(self, other) -> "CyclotomicNumber":
        if isinstance(other, CyclotomicNumber):
            if other.p != self.p:
                raise ValueError("different cyclotomic fields")
            return other
        return CyclotomicNumber(self.p, [other])

    def __add__(self, other):
        o = self._lift(other)
        return CyclotomicNumber(self.p, [a + b for a, b in zip(self.c, o.c)])

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicNumber(self.p, [-a for a in self.c])

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CyclotomicNumber(self.p, [a * other for a in self.c])
        o = self._lift(other)
        p = self.p
        full = [Fraction(0)] * p
        for i, a in enumerate(self.c):
            if a:
                for j, b in enumerate(o.c):
                    if b:
                        full[(i + j) % p] += a * b
        return CyclotomicNumber(p, _reduce_full(p, full))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return CyclotomicNumber(self.p, [a / other for a in self.c])
        return self * self._lift(other).inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out = CyclotomicNumber.one(self.p)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CyclotomicNumber(self.p, [other])
        if not isinstance(other, CyclotomicNumber):
            return NotImplemented
        return self.p == other.p and self.c == other.c

    def __hash__(self):
        return hash((self.p, self.c))

    def __bool__(self):
        return any(self.c)

    def conjugate(self, a: int) -> "CyclotomicNumber":
        """Image under zeta -> zeta^a, a prime to p."""
        p = self.p
        full = [Fraction(0)] * p
        for i, x in enumerate(self.c):
            full[(i * a) % p] += x
        return CyclotomicNumber(p, _reduce_full(p, full))

    def norm(self) -> Fraction:
        out = self
        for a in range(2, self.p):
            out = out * self.conjugate(a)
        return out.c[0]

    def inverse(self) -> "CyclotomicNumber":
        if not self:
            raise ZeroDivisionError("inverse of zero in Q(zeta_p)")
        if self.p == 2:
            return CyclotomicNumber(2, [1 / self.c[0]])
        others = CyclotomicNumber.one(self.p)
        for a in range(2, self.p):
            others = others * self.conjugate(a)
        nrm = (self * others).c[0]
        return others / nrm

    def is_rational(self) -> bool:
        return all(x == 0 for x in self.c[1:])

    def to_complex(self, dps: int = 40):
        import mpmath

        with mpmath.workdps(dps):
            z = mpmath.exp(2j * mpmath.pi / self.p)
            return mpmath.fsum(mpmath.mpf(x.numerator) / x.denominator * z**i for i, x in enumerate(self.c))

    def to_json(self) -> list[str]:
        return [str(x) for x in self.c]

    def __repr__(self):
        if self.is_rational():
            return f"Cyc{self.p}({self.c[0]})"
        return f"Cyc{self.p}({', '.join(str(x) for x in self.c)})"

    # -- (1 - zeta)-adic valuation -----------------------------------------------------

    def pi_valuation(self) -> float | int:
        """Exact valuation at the prime above p, normalized so v(1 - zeta) = 1."""
        if not self:
            return inf
        p = self.p
        den = 1
        for x in self.c:
            den = lcm(den, x.denominator)
        ints = [int(x * den) for x in self.c]
        g = 0
        for x in ints:
            g = gcd(g, x)
        v = (p - 1) * (p_adic_valuation(g, p) - p_adic_valuation(den, p))
        ints = [x // g for x in ints]
        # strip factors of (1 - zeta) from the content-free part; at most p-2 of them
        while sum(ints) % p == 0:
            ints = _divide_by_pi(ints, p)
            v += 1
        return v


def _divide_by_pi(x: list[int], p: int) -> list[int]:
    """Exact quotient x / (1 - zeta) for x with coefficient sum divisible by p."""
    if p == 2:
        return [x[0] // 2]
    s = sum(x)
    c = -s // p
    # X(t) + c * Phi_p(t) has X(1) + c p = 0, so (1 - t) divides it exactly
    y = [a + c for a in x] + [c]
    # divide y(t) by (1 - t): q_i = sum_{j <= i} y_j
    q = []
    acc = 0
    for a in y[:-1]:
        acc += a
        q.append(acc)
    return q


def ord_zeta(x: CyclotomicNumber, r: int = 1) -> tuple:
    """(v, ord_p, ord_q) with v the (1 - zeta)-adic valuation; infinities for 0."""
    v = x.pi_valuation()
    if v == inf:
        return inf, inf, inf
    return v, Fraction(v, x.p - 1), Fraction(v, r * (x.p - 1))


@lru_cache(maxsize=None)
def zeta_powers(p: int) -> tuple[CyclotomicNumber, ...]:
    return tuple(CyclotomicNumber.zeta_power(p, k) for k in range(p))
