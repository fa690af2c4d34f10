"""Homogeneous polynomials in graded pieces.

Polynomials are dictionaries from exponent tuples to integers.  A fixed
degree piece of the polynomial ring is indexed densely by the grevlex rank
of its monomials, which is how Macaulay matrices are laid out.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Mapping, Sequence

import numpy as np

from .errors import BadInput, DegreeMismatch

Monomial = tuple


def grevlex_key(a: Monomial):
    return (sum(a), tuple(-x for x in reversed(a)))


def grevlex_compare(a: Monomial, b: Monomial) -> int:
    """Return -1, 0 or 1 as ``a`` is smaller than, equal to or larger than ``b``."""
    if len(a) != len(b):
        raise ValueError("monomials live in different rings")
    ka, kb = grevlex_key(a), grevlex_key(b)
    return (ka > kb) - (ka < kb)


@lru_cache(maxsize=None)
def monomials(nvars: int, degree: int) -> tuple:
    """All monomials of a degree in increasing grevlex order."""
    if degree < 0:
        return ()
    out = []
    for bars in combinations(range(degree + nvars - 1), nvars - 1):
        prev = -1
        exps = []
        for b in bars:
            exps.append(b - prev - 1)
            prev = b
        exps.append(degree + nvars - 2 - prev)
        out.append(tuple(exps))
    return tuple(sorted(out, key=grevlex_key))


@lru_cache(maxsize=None)
def monomial_index(nvars: int, degree: int) -> dict:
    return {m: i for i, m in enumerate(monomials(nvars, degree))}


@dataclass(frozen=True)
class GradedPoly:
    """A homogeneous polynomial; ``modulus`` is None over the integers."""

    coeffs: Mapping
    nvars: int
    degree: int
    modulus: int | None = None

    def __post_init__(self):
        clean = {}
        for m, c in self.coeffs.items():
            m = tuple(m)
            if len(m) != self.nvars:
                raise ValueError("monomial has the wrong number of variables")
            if sum(m) != self.degree:
                raise DegreeMismatch(f"monomial {m} is not of degree {self.degree}")
            c = c % self.modulus if self.modulus else c
            if c:
                clean[m] = clean.get(m, 0) + c
        object.__setattr__(self, "coeffs", {m: c for m, c in clean.items() if c})

    @classmethod
    def from_dict(cls, coeffs: Mapping, modulus: int | None = None) -> GradedPoly:
        items = {tuple(m): c for m, c in coeffs.items() if c}
        if not items:
            raise DegreeMismatch("zero polynomial has no degree")
        degrees = {sum(m) for m in items}
        if len(degrees) != 1:
            raise DegreeMismatch("polynomial is not homogeneous")
        return cls(items, len(next(iter(items))), degrees.pop(), modulus)

    def derivative(self, i: int) -> GradedPoly:
        out = {}
        for m, c in self.coeffs.items():
            if m[i]:
                e = list(m)
                e[i] -= 1
                out[tuple(e)] = c * m[i]
        return GradedPoly(out, self.nvars, self.degree - 1, self.modulus)

    def gradient(self) -> list[GradedPoly]:
        return [self.derivative(i) for i in range(self.nvars)]

    def to_vector(self) -> list[int]:
        idx = monomial_index(self.nvars, self.degree)
        v = [0] * len(idx)
        for m, c in self.coeffs.items():
            v[idx[m]] = c
        return v

    def __mul__(self, other: GradedPoly) -> GradedPoly:
        return GradedPoly(poly_mul(self.coeffs, other.coeffs, self.modulus), self.nvars, self.degree + other.degree, self.modulus)

    def __pow__(self, k: int) -> GradedPoly:
        return GradedPoly(poly_pow(self.coeffs, k, self.modulus), self.nvars, self.degree * k, self.modulus)


def poly_mul(a: Mapping, b: Mapping, modulus: int | None = None) -> dict:
    out: dict = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            m = tuple(x + y for x, y in zip(ma, mb))
            out[m] = out.get(m, 0) + ca * cb
    if modulus:
        return {m: c % modulus for m, c in out.items() if c % modulus}
    return {m: c for m, c in out.items() if c}


def poly_pow(a: Mapping, k: int, modulus: int | None = None) -> dict:
    nvars = len(next(iter(a)))
    out = {(0,) * nvars: 1}
    for _ in range(k):
        out = poly_mul(out, a, modulus)
    return out


def macaulay_matrix(gens: Sequence[GradedPoly], t: int, modulus: int | None = None) -> np.ndarray:
    """Matrix of ``(g_i) -> sum g_i * gens[i]`` into degree ``t``.

    Rows are indexed by the degree ``t`` monomials and columns by pairs
    (generator, source monomial), both in decreasing grevlex order (leading
    monomial first) with the generator index varying slowest.
    """
    if not gens:
        raise ValueError("no generators")
    nvars = gens[0].nvars
    for g in gens:
        if not isinstance(g, GradedPoly):
            raise DegreeMismatch("generator is not a homogeneous polynomial")
    size = len(monomials(nvars, t))
    target = {m: size - 1 - i for m, i in monomial_index(nvars, t).items()}
    cols = []
    for g in gens:
        for src in reversed(monomials(nvars, t - g.degree)):
            col = np.zeros(size, dtype=object)
            for m, c in g.coeffs.items():
                col[target[tuple(x + y for x, y in zip(src, m))]] += c
            cols.append(col)
    if not cols:
        return np.zeros((len(target), 0), dtype=object)
    M = np.stack(cols, axis=1)
    return M % modulus if modulus else M


def hilbert_coefficient(nvars: int, d: int, t: int) -> int:
    """Coefficient of ``u^t`` in ``(1 + u + ... + u^(d-2))^nvars``."""
    poly = [1]
    for _ in range(nvars):
        new = [0] * (len(poly) + d - 2)
        for i, c in enumerate(poly):
            for k in range(d - 1):
                new[i + k] += c
        poly = new
    return poly[t] if 0 <= t < len(poly) else 0


# parsing ---------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*^()]))")


def _tokenize(text: str) -> list:
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise BadInput(f"unexpected character at position {pos}: {text[pos:pos + 10]!r}")
        num, name, op = m.groups()
        if num is not None:
            out.append(("num", int(num)))
        elif name is not None:
            out.append(("var", name))
        else:
            out.append(("op", "^" if op == "**" else op))
        pos = m.end()
    return out


class _Parser:
    # expr := term (('+'|'-') term)* ; term := factor (('*')? factor)*
    # factor := ('-'|'+') factor | atom ('^' integer)? ; atom := integer | var | '(' expr ')'

    def __init__(self, tokens, variables):
        self.tokens = tokens
        self.i = 0
        self.index = {v: k for k, v in enumerate(variables)}
        self.nvars = len(variables)

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expr(self):
        acc = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            sign = self.take()[1]
            rhs = self.term()
            if sign == "-":
                rhs = {m: -c for m, c in rhs.items()}
            acc = _add(acc, rhs)
        return acc

    def term(self):
        acc = self.factor()
        while True:
            kind, val = self.peek()
            if (kind, val) == ("op", "*"):
                self.take()
            elif kind in ("num", "var") or (kind, val) == ("op", "("):
                pass
            else:
                return acc
            acc = poly_mul(acc, self.factor())

    def factor(self):
        kind, val = self.peek()
        if (kind, val) in (("op", "-"), ("op", "+")):
            self.take()
            inner = self.factor()
            return {m: -c for m, c in inner.items()} if val == "-" else inner
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            kind, e = self.take()
            if kind != "num":
                raise BadInput("exponent must be a non-negative integer")
            return poly_pow(base, e) if base else {}
        return base

    def atom(self):
        kind, val = self.take()
        zero = (0,) * self.nvars
        if kind == "num":
            return {zero: val} if val else {}
        if kind == "var":
            if val not in self.index:
                raise BadInput(f"unknown variable {val!r}")
            e = [0] * self.nvars
            e[self.index[val]] = 1
            return {tuple(e): 1}
        if (kind, val) == ("op", "("):
            inner = self.expr()
            if self.take() != ("op", ")"):
                raise BadInput("unbalanced parenthesis")
            return inner
        raise BadInput(f"unexpected token {val!r}")


def _add(a, b):
    out = dict(a)
    for m, c in b.items():
        out[m] = out.get(m, 0) + c
    return {m: c for m, c in out.items() if c}


def default_variables(text: str) -> list[str]:
    """Variable order used when none is given.

    Indexed names ``x0, x1, ...`` sort by index.  Otherwise the letters
    ``x, y, z, w`` come first in that order, followed by any other names
    alphabetically.
    """
    names = sorted({v for k, v in _tokenize(text) if k == "var"})
    if names and all(re.fullmatch(r"x\d+", v) for v in names):
        top = max(int(v[1:]) for v in names)
        return [f"x{i}" for i in range(top + 1)]
    preferred = [v for v in ("x", "y", "z", "w") if v in names]
    return preferred + [v for v in names if v not in preferred]


def parse_polynomial(text: str, variables: Sequence[str] | None = None) -> dict:
    """Parse integer polynomial text into an exponent dictionary.

    Accepts ``+ - * ^ **``, parentheses, integers and identifiers; juxtaposed
    factors multiply.  Returns the coefficient map and does not require
    homogeneity.
    """
    variables = list(variables) if variables else default_variables(text)
    parser = _Parser(_tokenize(text), variables)
    if not parser.tokens:
        raise BadInput("empty polynomial")
    result = parser.expr()
    if parser.i != len(parser.tokens):
        raise BadInput(f"trailing input near token {parser.i}")
    return result


def parse_homogeneous(text: str, variables: Sequence[str] | None = None) -> tuple[GradedPoly, list[str]]:
    variables = list(variables) if variables else default_variables(text)
    coeffs = parse_polynomial(text, variables)
    try:
        return GradedPoly.from_dict(coeffs), variables
    except DegreeMismatch as exc:
        raise BadInput(str(exc)) from exc


def format_polynomial(coeffs: Mapping, variables: Sequence[str]) -> str:
    terms = []
    for m in sorted(coeffs, key=grevlex_key, reverse=True):
        c = coeffs[m]
        mono = "*".join(v if e == 1 else f"{v}^{e}" for v, e in zip(variables, m) if e)
        if not mono:
            body = str(abs(c))
        elif abs(c) == 1:
            body = mono
        else:
            body = f"{abs(c)}*{mono}"
        terms.append(("- " if c < 0 else "+ ") + body)
    if not terms:
        return "0"
    text = " ".join(terms)
    return text[2:] if text.startswith("+ ") else "-" + text[2:]
