"""Table-driven arithmetic in F_{p^R}.

Elements are encoded as integers ``0 <= a < p**R`` whose base-p digits are the
coefficients (constant term first) of a polynomial in the class ``g`` of
``x`` modulo the field modulus.  Multiplication goes through discrete-log
tables, addition is digitwise.  Tables are built once per field and cached.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from math import gcd
from typing import Iterable, Sequence

import numpy as np
from sympy import factorint, isprime

MAX_TABLE_ORDER = 1 << 24


class FieldError(ValueError):
    pass


# -- polynomials over F_p as coefficient lists (constant term first) --------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: list[int], m: Sequence[int], p: int) -> list[int]:
    a = [x % p for x in a]
    _trim(a)
    dm = len(m) - 1
    inv_lead = pow(m[-1], -1, p)
    while len(a) - 1 >= dm:
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - dm
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mi) % p
        _trim(a)
    return a


def _poly_mulmod(a: list[int], b: list[int], m: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _poly_mod(out, m, p)


def _poly_powmod(a: list[int], e: int, m: Sequence[int], p: int) -> list[int]:
    result = [1]
    base = _poly_mod(list(a), m, p)
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, m, p)
        base = _poly_mulmod(base, base, m, p)
        e >>= 1
    return result


def _poly_sub(a: list[int], b: list[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)]
    return _trim(out)


def _poly_gcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim([x % p for x in a]), _trim([x % p for x in b])
    while b:
        a, b = b, _poly_mod(a, b, p)
    if a:
        inv = pow(a[-1], -1, p)
        a = [x * inv % p for x in a]
    return a


def is_irreducible(modulus: Sequence[int], p: int) -> bool:
    """Rabin's irreducibility test for a polynomial over F_p."""
    m = _trim([int(c) % p for c in modulus])
    deg = len(m) - 1
    if deg < 1:
        return False
    if deg == 1:
        return True
    x = [0, 1]
    if _poly_sub(_poly_powmod(x, p**deg, m, p), x, p):
        return False
    for ell in factorint(deg):
        h = _poly_sub(_poly_powmod(x, p ** (deg // ell), m, p), x, p)
        if len(_poly_gcd(m, h, p)) != 1:
            return False
    return True


def _is_primitive_modulus(modulus: Sequence[int], p: int) -> bool:
    deg = len(modulus) - 1
    order = p**deg - 1
    for ell in factorint(order):
        if _poly_powmod([0, 1], order // ell, modulus, p) == [1]:
            return False
    return True


@lru_cache(maxsize=None)
def default_modulus(p: int, degree: int) -> tuple[int, ...]:
    """Lexicographically first primitive monic polynomial of the given degree.

    Coefficients are enumerated as base-p integers, constant term least
    significant, so the choice is reproducible.
    """
    if degree == 1:
        g = next(g for g in range(1, p) if _is_primitive_modulus((-g % p, 1), p)) if p > 2 else 1
        return ((-g) % p, 1)
    for code in range(p**degree):
        coeffs = [(code // p**i) % p for i in range(degree)] + [1]
        if coeffs[0] == 0:
            continue
        if is_irreducible(coeffs, p) and _is_primitive_modulus(coeffs, p):
            return tuple(coeffs)
    raise FieldError(f"no primitive polynomial of degree {degree} over F_{p}")


@dataclass(frozen=True, eq=False)
class FieldElement:
    """Boxed element with operator overloading; the engine itself uses ints."""

    field: "GF"
    value: int

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldError("elements of different fields")
            return other.value
        return self.field.from_int(int(other))

    def __add__(self, other):
        return FieldElement(self.field, self.field.add(self.value, self._coerce(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(self.field, self.field.sub(self.value, self._coerce(other)))

    def __rsub__(self, other):
        return FieldElement(self.field, self.field.sub(self._coerce(other), self.value))

    def __mul__(self, other):
        return FieldElement(self.field, self.field.mul(self.value, self._coerce(other)))

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.value))

    def __truediv__(self, other):
        return FieldElement(self.field, self.field.mul(self.value, self.field.inv(self._coerce(other))))

    def __pow__(self, e: int):
        return FieldElement(self.field, self.field.pow(self.value, e))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.value == other.value
        if isinstance(other, int):
            return self.value == self.field.from_int(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.field.order, self.value))

    def __repr__(self):
        return f"{self.field.format(self.value)} in F_{self.field.order}"


class GF:
    """The finite field F_{p^degree} with a fixed irreducible modulus."""

    def __init__(self, p: int, degree: int = 1, modulus: Sequence[int] | None = None):
        if not isprime(p):
            raise FieldError(f"{p} is not prime")
        if degree < 1:
            raise FieldError("degree must be positive")
        self.p = int(p)
        self.degree = int(degree)
        self.order = self.p**self.degree
        if self.order > MAX_TABLE_ORDER:
            raise FieldError(f"field of order {self.order} exceeds table limit {MAX_TABLE_ORDER}")
        if modulus is None:
            modulus = default_modulus(self.p, self.degree)
        mod = [int(c) % self.p for c in modulus]
        _trim(mod)
        if len(mod) - 1 != self.degree:
            raise FieldError(f"modulus {list(modulus)} does not have degree {self.degree}")
        if mod[-1] != 1:
            inv = pow(mod[-1], -1, self.p)
            mod = [c * inv % self.p for c in mod]
        if not is_irreducible(mod, self.p):
            raise FieldError(f"modulus {list(modulus)} is reducible over F_{self.p}")
        self.modulus = tuple(mod)
        self._powers = np.array([self.p**i for i in range(self.degree)], dtype=np.int64)

    def __eq__(self, other):
        return isinstance(other, GF) and (self.p, self.modulus) == (other.p, other.modulus)

    def __hash__(self):
        return hash((self.p, self.modulus))

    def __repr__(self):
        return f"GF({self.p}^{self.degree}, modulus={list(self.modulus)})"

    def __call__(self, value: int) -> FieldElement:
        """Box an encoded element (digits = polynomial coefficients in g)."""
        if not 0 <= value < self.order:
            raise FieldError(f"{value} is not an element encoding for F_{self.order}")
        return FieldElement(self, int(value))

    # -- encoding ----------------------------------------------------------

    def digits(self, a: int) -> list[int]:
        return [(a // self.p**i) % self.p for i in range(self.degree)]

    def from_digits(self, ds: Iterable[int]) -> int:
        ds = list(ds)
        if len(ds) > self.degree:
            ds = _poly_mod(ds, self.modulus, self.p)
        return sum((int(c) % self.p) * self.p**i for i, c in enumerate(ds))

    def from_int(self, n: int) -> int:
        """Image of an integer under Z -> F_p -> this field."""
        return n % self.p

    def format(self, a: int) -> str:
        if self.degree == 1:
            return str(a)
        terms = []
        for i, c in enumerate(self.digits(a)):
            if c:
                mon = "" if i == 0 else ("g" if i == 1 else f"g^{i}")
                terms.append(str(c) if not mon else (mon if c == 1 else f"{c}*{mon}"))
        return " + ".join(reversed(terms)) or "0"

    def elements(self) -> range:
        return range(self.order)

    # -- tables ------------------------------------------------------------

    @cached_property
    def _tables(self) -> tuple[np.ndarray, np.ndarray, int]:
        q1 = self.order - 1
        gen = self._find_generator()
        exp = np.zeros(max(q1, 1), dtype=np.int64)
        log = np.full(self.order, -1, dtype=np.int64)
        g_digits = self.digits(gen)
        cur = [1]
        for i in range(q1):
            a = self.from_digits(cur)
            exp[i] = a
            log[a] = i
            cur = _poly_mulmod(cur, g_digits, self.modulus, self.p)
        if q1 and (log[1:] < 0).any():
            raise FieldError("generator search failed")
        return exp, log, gen

    def _find_generator(self) -> int:
        if self.order == 2:
            return 1
        q1 = self.order - 1
        primes = list(factorint(q1))
        for cand in range(2 if self.degree == 1 else self.p, self.order):
            ds = self.digits(cand)
            if all(_poly_powmod(ds, q1 // ell, self.modulus, self.p) != [1] for ell in primes):
                return cand
        raise FieldError("no generator found")

    @property
    def exp_table(self) -> np.ndarray:
        return self._tables[0]

    @property
    def log_table(self) -> np.ndarray:
        """log[a] for a != 0; log[0] == -1."""
        return self._tables[1]

    @property
    def generator(self) -> int:
        return self._tables[2]

    # -- scalar arithmetic ---------------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        out, pw = 0, 1
        for _ in range(self.degree):
            out += ((a % self.p + b % self.p) % self.p) * pw
            a //= self.p
            b //= self.p
            pw *= self.p
        return out

    def neg(self, a: int) -> int:
        if self.p == 2:
            return a
        return self.from_digits([(-d) % self.p for d in self.digits(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        log = self.log_table
        return int(self.exp_table[(log[a] + log[b]) % (self.order - 1)])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return int(self.exp_table[(-self.log_table[a]) % (self.order - 1)])

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e < 0:
                raise ZeroDivisionError("negative power of zero")
            return 1 if e == 0 else 0
        return int(self.exp_table[(int(self.log_table[a]) * e) % (self.order - 1)])

    def frobenius(self, a: int, times: int = 1) -> int:
        return self.pow(a, self.p ** (times % self.degree))

    def is_in_subfield(self, a: int, sub_degree: int) -> bool:
        return self.pow(a, self.p**sub_degree) == a

    def trace(self, a: int, to_degree: int = 1) -> int:
        """Trace down to the subfield F_{p^to_degree} (sum of its conjugates)."""
        if self.degree % to_degree:
            raise FieldError(f"F_{self.p}^{to_degree} is not a subfield of {self!r}")
        s = 0
        for j in range(self.degree // to_degree):
            s = self.add(s, self.pow(a, self.p ** (to_degree * j)))
        return s

    def nth_root(self, a: int, n: int) -> int | None:
        """Some x with x**n == a, or None if none exists in this field."""
        if a == 0:
            return 0
        q1 = self.order - 1
        la = int(self.log_table[a])
        g = gcd(n, q1)
        if la % g:
            return None
        n_red, q_red = n // g, q1 // g
        x = (la // g) * pow(n_red, -1, q_red) % q_red if q_red > 1 else 0
        return int(self.exp_table[x])

    # -- vectorised arithmetic ----------------------------------------------------

    def add_vec(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if self.p == 2:
            return np.bitwise_xor(a, b)
        out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        for pw in self._powers:
            out += (((a // pw) % self.p + (b // pw) % self.p) % self.p) * pw
        return out

    @cached_property
    def absolute_trace_table(self) -> np.ndarray:
        """Tr_{F_{p^R}/F_p}(a) for every element a, as integers mod p."""
        basis_tr = np.array([self.trace(self.from_digits([0] * i + [1])) for i in range(self.degree)], dtype=np.int64)
        elems = np.arange(self.order, dtype=np.int64)
        digits = (elems[:, None] // self._powers[None, :]) % self.p
        return (digits @ basis_tr) % self.p

    @cached_property
    def trace_by_log(self) -> np.ndarray:
        return self.absolute_trace_table[self.exp_table]

    # -- towers ---------------------------------------------------------------

    def extension(self, m: int) -> "GF":
        """F_{q^m} for q = self.order, as a single extension of F_p."""
        if m == 1:
            return self
        return get_field(self.p, self.degree * m)

    def embedding_from(self, small: "GF") -> np.ndarray:
        """Array ``e`` with ``e[a]`` the image of ``a`` in this field."""
        return _embedding(small, self)


@lru_cache(maxsize=None)
def get_field(p: int, degree: int, modulus: tuple[int, ...] | None = None) -> GF:
    return GF(p, degree, modulus)


@lru_cache(maxsize=None)
def _embedding(small: GF, big: GF) -> np.ndarray:
    if small.p != big.p or big.degree % small.degree:
        raise FieldError(f"{small!r} does not embed in {big!r}")
    if small == big:
        return np.arange(big.order, dtype=np.int64)
    q1 = big.order - 1
    step = q1 // (small.order - 1)
    root = None
    for k in range(small.order - 1):
        cand = int(big.exp_table[k * step])
        acc, pw = 0, 1
        for c in small.modulus:
            if c:
                acc = big.add(acc, big.mul(big.from_int(c), pw))
            pw = big.mul(pw, cand)
        if acc == 0:
            root = cand
            break
    if root is None:
        raise FieldError("no root of the subfield modulus found")
    powers = [1]
    for _ in range(small.degree - 1):
        powers.append(big.mul(powers[-1], root))
    table = np.zeros(small.order, dtype=np.int64)
    for a in range(small.order):
        acc = 0
        for c, pw in zip(small.digits(a), powers):
            if c:
                acc = big.add(acc, big.mul(big.from_int(c), pw))
        table[a] = acc
    return table
