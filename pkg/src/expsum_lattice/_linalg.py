"""Small exact linear-algebra helpers over Z and Q."""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

Vector = tuple
Matrix = tuple


def as_int_matrix(rows: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(int(x) for x in r) for r in rows)


def det_int(rows: Sequence[Sequence[int]]) -> int:
    """Bareiss fraction-free determinant of a square integer matrix."""
    a = [list(r) for r in rows]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def det_frac(rows: Sequence[Sequence]) -> Fraction:
    a = [[Fraction(x) for x in r] for r in rows]
    n = len(a)
    d = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            d = -d
        d *= a[c][c]
        for i in range(c + 1, n):
            if a[i][c]:
                f = a[i][c] / a[c][c]
                for j in range(c, n):
                    a[i][j] -= f * a[c][j]
    return d


def rank(rows: Sequence[Sequence]) -> int:
    a = [[Fraction(x) for x in r] for r in rows]
    if not a:
        return 0
    ncols = len(a[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        for i in range(r + 1, len(a)):
            if a[i][c]:
                f = a[i][c] / a[r][c]
                for j in range(c, ncols):
                    a[i][j] -= f * a[r][j]
        r += 1
        if r == len(a):
            break
    return r


def inverse_frac(rows: Sequence[Sequence]) -> list[list[Fraction]]:
    n = len(rows)
    a = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(rows)]
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        a[c], a[piv] = a[piv], a[c]
        inv = 1 / a[c][c]
        a[c] = [x * inv for x in a[c]]
        for i in range(n):
            if i != c and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return [r[n:] for r in a]


def solve_left(basis: Sequence[Sequence], u: Sequence) -> list[Fraction] | None:
    """Rational x with x . basis = u, or None if u is outside the row span.

    ``basis`` rows must be linearly independent.
    """
    k = len(basis)
    if k == 0:
        return [] if all(x == 0 for x in u) else None
    n = len(u)
    # augmented system basis^T x = u
    a = [[Fraction(basis[i][j]) for i in range(k)] + [Fraction(u[j])] for j in range(n)]
    r = 0
    pivots = []
    for c in range(k):
        piv = next((i for i in range(r, n) if a[i][c] != 0), None)
        if piv is None:
            raise ValueError("basis rows are linearly dependent")
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(n):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(r)
        r += 1
    if any(a[i][k] != 0 for i in range(r, n)):
        return None
    return [a[i][k] for i in range(k)]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list]:
    bt = list(zip(*b)) if b else []
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def vecmat(v: Sequence, m: Sequence[Sequence]) -> list:
    if not m:
        return []
    return [sum(v[i] * m[i][j] for i in range(len(m))) for j in range(len(m[0]))]


def dot(a: Sequence, b: Sequence):
    return sum(x * y for x, y in zip(a, b))


def primitive(v: Sequence[int]) -> tuple[int, ...]:
    g = 0
    for x in v:
        g = gcd(g, int(x))
    if g == 0:
        return tuple(int(x) for x in v)
    return tuple(int(x) // g for x in v)


def clear_denominators(v: Sequence[Fraction]) -> tuple[int, ...]:
    """Smallest positive integer multiple of a rational vector, made primitive."""
    den = 1
    for x in v:
        x = Fraction(x)
        den = den * x.denominator // gcd(den, x.denominator)
    return primitive([int(Fraction(x) * den) for x in v])


def p_adic_valuation(x: int | Fraction, p: int) -> int | None:
    """v_p of a nonzero rational; None for zero."""
    x = Fraction(x)
    if x == 0:
        return None
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v
