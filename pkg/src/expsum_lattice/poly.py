"""Laurent polynomials over a finite field F_q."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .ff.field import GF

Exponent = tuple[int, ...]


@dataclass(frozen=True)
class LaurentPoly:
    """``sum a_j x^j`` with ``a_j`` nonzero elements of ``field`` (int-encoded).

    ``torus`` flags the variables allowed to carry negative exponents; the
    remaining ones are affine.
    """

    nvars: int
    terms: Mapping[Exponent, int]
    field: GF
    names: tuple[str, ...] = ()
    torus: tuple[bool, ...] = ()

    def __post_init__(self):
        clean = {}
        for j, a in self.terms.items():
            j = tuple(int(x) for x in j)
            if len(j) != self.nvars:
                raise ValueError(f"exponent {j} has wrong length for {self.nvars} variables")
            a = int(a)
            if a:
                clean[j] = a
        object.__setattr__(self, "terms", dict(sorted(clean.items())))
        if not self.names:
            object.__setattr__(self, "names", tuple(f"x{i + 1}" for i in range(self.nvars)))
        if not self.torus:
            object.__setattr__(self, "torus", tuple(False for _ in range(self.nvars)))
        if len(self.names) != self.nvars or len(self.torus) != self.nvars:
            raise ValueError("names/torus length mismatch")
        for j in self.terms:
            for i, e in enumerate(j):
                if e < 0 and not self.torus[i]:
                    raise ValueError(f"negative exponent on affine variable {self.names[i]}")

    @classmethod
    def from_terms(cls, terms: Mapping[Sequence[int], int] | Iterable[tuple[Sequence[int], int]], field: GF,
                   names: Sequence[str] = (), torus: Sequence[bool] | bool | None = None) -> "LaurentPoly":
        items = list(terms.items()) if isinstance(terms, Mapping) else list(terms)
        if not items and not names:
            raise ValueError("cannot infer the number of variables of an empty polynomial")
        nvars = len(items[0][0]) if items else len(names)
        acc: dict[Exponent, int] = {}
        for j, a in items:
            j = tuple(int(x) for x in j)
            acc[j] = field.add(acc.get(j, 0), int(a))
        if torus is None:
            torus_t = tuple(any(j[i] < 0 for j in acc) for i in range(nvars))
        elif isinstance(torus, bool):
            torus_t = (torus,) * nvars
        else:
            torus_t = tuple(bool(t) for t in torus)
        return cls(nvars, acc, field, tuple(names), torus_t)

    @classmethod
    def monomials(cls, exponents: Iterable[Sequence[int]], field: GF, **kw) -> "LaurentPoly":
        """All coefficients equal to 1."""
        return cls.from_terms([(j, 1) for j in exponents], field, **kw)

    # -- basic views -------------------------------------------------------

    @property
    def support(self) -> list[Exponent]:
        return list(self.terms)

    @property
    def p(self) -> int:
        return self.field.p

    def is_zero(self) -> bool:
        return not self.terms

    def is_polynomial(self) -> bool:
        return all(e >= 0 for j in self.terms for e in j)

    def affine_indices(self) -> list[int]:
        return [i for i, t in enumerate(self.torus) if not t]

    def with_terms(self, terms: Mapping[Exponent, int]) -> "LaurentPoly":
        return LaurentPoly(self.nvars, dict(terms), self.field, self.names, self.torus)

    def with_torus(self, torus: Sequence[bool] | bool) -> "LaurentPoly":
        t = (torus,) * self.nvars if isinstance(torus, bool) else tuple(torus)
        return LaurentPoly(self.nvars, self.terms, self.field, self.names, t)

    def restrict_support(self, keep) -> "LaurentPoly":
        return self.with_terms({j: a for j, a in self.terms.items() if keep(j)})

    def scale_terms(self, scalars: Mapping[Exponent, int]) -> "LaurentPoly":
        """Multiply each coefficient a_j by the integer scalars[j] (mod p)."""
        f = self.field
        return self.with_terms({j: f.mul(a, f.from_int(scalars[j])) for j, a in self.terms.items()})

    def map_exponents(self, fn, nvars: int, names: Sequence[str] = (), torus: Sequence[bool] | bool = True) -> "LaurentPoly":
        acc: dict[Exponent, int] = {}
        for j, a in self.terms.items():
            k = tuple(fn(j))
            acc[k] = self.field.add(acc.get(k, 0), a)
        t = (torus,) * nvars if isinstance(torus, bool) else tuple(torus)
        return LaurentPoly(nvars, acc, self.field, tuple(names), t)

    def evaluate(self, point: Sequence[int], big: GF | None = None) -> int:
        """Slow reference evaluation at a point of ``big`` (default: own field)."""
        big = big or self.field
        emb = big.embedding_from(self.field)
        total = 0
        for j, a in self.terms.items():
            v = int(emb[a])
            for x, e in zip(point, j):
                v = big.mul(v, big.pow(x, e))
            total = big.add(total, v)
        return total

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        acc = dict(self.terms)
        for j, a in other.terms.items():
            acc[j] = self.field.add(acc.get(j, 0), a)
        return self.with_terms(acc)

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        acc = dict(self.terms)
        for j, a in other.terms.items():
            acc[j] = self.field.sub(acc.get(j, 0), a)
        return self.with_terms(acc)

    def __str__(self) -> str:
        from .parser import format_poly

        return format_poly(self)
