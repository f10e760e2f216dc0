"""Text syntax for Laurent polynomials over F_q.

Grammar (whitespace-insensitive)::

    poly    = [sign] term { sign term }
    sign    = "+" | "-"
    term    = factor { "*" factor }
    factor  = atom [ "^" exponent ]
    atom    = integer | "g" | variable | "(" coeff ")"
    coeff   = [sign] cterm { sign cterm }          (no variables inside)
    cterm   = catom { "*" catom }
    catom   = (integer | "g" | "(" coeff ")") [ "^" exponent ]
    exponent = [ "-" ] integer | "(" [ "-" ] integer ")"

``g`` denotes the class of the modulus variable, so field elements of F_q are
written as polynomials in ``g`` with integer coefficients.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

from .ff.field import GF
from .poly import LaurentPoly

GEN = "g"
_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\*\*|[-+*^()]))")


class ParseError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset
        self.reason = message


@dataclass
class _Tok:
    kind: str  # int, name, op, end
    text: str
    offset: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(m.lastindex)
        if m.group(1):
            toks.append(_Tok("int", m.group(1), start))
        elif m.group(2):
            toks.append(_Tok("name", m.group(2), start))
        else:
            op = "^" if m.group(3) == "**" else m.group(3)
            toks.append(_Tok("op", op, start))
        pos = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


def _natural_key(name: str):
    m = re.match(r"([A-Za-z_]*)(\d*)$", name)
    if m:
        return (m.group(1), int(m.group(2)) if m.group(2) else -1, name)
    return (name, -1, name)


def infer_variables(text: str) -> list[str]:
    names = {t.text for t in _tokenize(text) if t.kind == "name" and t.text != GEN}
    return sorted(names, key=_natural_key)


class _Parser:
    def __init__(self, text: str, varnames: Sequence[str], field: GF, torus: Sequence[bool]):
        self.toks = _tokenize(text)
        self.i = 0
        self.vars = {v: k for k, v in enumerate(varnames)}
        self.names = tuple(varnames)
        self.field = field
        self.torus = tuple(torus)
        if GEN in self.vars:
            raise ParseError(f"'{GEN}' is reserved for the field generator", 0)
        if field.degree == 1:
            self.gen = (-field.modulus[0]) % field.p
        else:
            self.gen = field.from_digits([0, 1])

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, op: str):
        if self.tok.kind != "op" or self.tok.text != op:
            raise ParseError(f"expected {op!r}", self.tok.offset)
        self.take()

    def is_op(self, *ops) -> bool:
        return self.tok.kind == "op" and self.tok.text in ops

    # -- exponents & coefficients --------------------------------------------

    def exponent(self) -> int:
        paren = self.is_op("(")
        if paren:
            self.take()
        sign = 1
        if self.is_op("-", "+"):
            sign = -1 if self.take().text == "-" else 1
        if self.tok.kind != "int":
            raise ParseError("expected integer exponent", self.tok.offset)
        e = sign * int(self.take().text)
        if paren:
            self.expect(")")
        return e

    def coeff_power(self, c: int) -> int:
        if self.is_op("^"):
            self.take()
            off = self.tok.offset
            e = self.exponent()
            if e < 0 and c == 0:
                raise ParseError("negative power of zero", off)
            return self.field.pow(c, e)
        return c

    def coeff(self) -> int:
        f = self.field
        total = 0
        sign = 1
        if self.is_op("+", "-"):
            sign = -1 if self.take().text == "-" else 1
        while True:
            c = self.cterm()
            total = f.add(total, c if sign > 0 else f.neg(c))
            if self.is_op("+", "-"):
                sign = -1 if self.take().text == "-" else 1
                continue
            return total

    def cterm(self) -> int:
        c = self.catom()
        while self.is_op("*"):
            self.take()
            c = self.field.mul(c, self.catom())
        return c

    def catom(self) -> int:
        t = self.tok
        if t.kind == "int":
            self.take()
            return self.coeff_power(self.field.from_int(int(t.text)))
        if t.kind == "name" and t.text == GEN:
            self.take()
            return self.coeff_power(self.gen)
        if self.is_op("("):
            self.take()
            c = self.coeff()
            self.expect(")")
            return self.coeff_power(c)
        if t.kind == "name":
            raise ParseError(f"variable {t.text!r} inside a coefficient", t.offset)
        raise ParseError("expected a coefficient", t.offset)

    # -- polynomial ---------------------------------------------------------------

    def poly(self) -> dict[tuple[int, ...], int]:
        f = self.field
        acc: dict[tuple[int, ...], int] = {}
        sign = 1
        if self.is_op("+", "-"):
            sign = -1 if self.take().text == "-" else 1
        while True:
            c, j = self.term()
            if sign < 0:
                c = f.neg(c)
            acc[j] = f.add(acc.get(j, 0), c)
            if self.is_op("+", "-"):
                sign = -1 if self.take().text == "-" else 1
                continue
            break
        if self.tok.kind != "end":
            raise ParseError(f"unexpected {self.tok.text!r}", self.tok.offset)
        return acc

    def term(self) -> tuple[int, tuple[int, ...]]:
        j = [0] * len(self.names)
        c = self.factor(j)
        while self.is_op("*"):
            self.take()
            c = self.field.mul(c, self.factor(j))
        return c, tuple(j)

    def factor(self, j: list[int]) -> int:
        """Multiply a variable power into ``j`` or return a coefficient."""
        t = self.tok
        if t.kind == "name" and t.text != GEN:
            if t.text not in self.vars:
                raise ParseError(f"unknown variable {t.text!r}", t.offset)
            self.take()
            idx = self.vars[t.text]
            e = 1
            if self.is_op("^"):
                self.take()
                off = self.tok.offset
                e = self.exponent()
                if e < 0 and not self.torus[idx]:
                    raise ParseError(f"negative exponent on affine variable {t.text!r}", off)
            j[idx] += e
            return 1
        if t.kind == "end":
            raise ParseError("expected a term", t.offset)
        return self.catom()


def parse_poly(text: str, varnames: Sequence[str] | None, field: GF,
               torus: Sequence[str] | Sequence[bool] | bool = False) -> LaurentPoly:
    """Parse ``text``; ``torus`` lists the variables allowed negative exponents."""
    names = list(varnames) if varnames else infer_variables(text)
    if not names:
        raise ParseError("polynomial has no variables", 0)
    if isinstance(torus, bool):
        flags = [torus] * len(names)
    elif all(isinstance(t, bool) for t in torus) and len(torus) == len(names) and torus:
        flags = list(torus)
    else:
        unknown = [t for t in torus if t not in names]
        if unknown:
            raise ParseError(f"unknown torus variable {unknown[0]!r}", 0)
        flags = [v in torus for v in names]
    p = _Parser(text, names, field, flags)
    acc = p.poly()
    return LaurentPoly(len(names), acc, field, tuple(names), tuple(flags))


def _format_coeff(field: GF, a: int) -> tuple[str, bool]:
    """Text of a coefficient and whether it is a single atom."""
    if field.degree == 1:
        return str(a), True
    s = field.format(a)
    atom = "+" not in s
    return s, atom


def format_poly(f: LaurentPoly) -> str:
    """Canonical text; parse(format_poly(f)) == f."""
    if f.is_zero():
        return "0"
    parts = []
    for j, a in sorted(f.terms.items(), reverse=True):
        mono = "*".join(n if e == 1 else f"{n}^{e}" for n, e in zip(f.names, j) if e)
        cs, atom = _format_coeff(f.field, a)
        if not mono:
            parts.append(cs if atom else f"({cs})")
        elif cs == "1":
            parts.append(mono)
        else:
            parts.append(f"{cs}*{mono}" if atom else f"({cs})*{mono}")
    return " + ".join(parts)
