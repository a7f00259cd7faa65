"""Integer polynomials in named variables."""
from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import ConstantTerm, PolySyntaxError


@dataclass(frozen=True)
class Poly:
    terms: tuple  # sorted ((exponents...), coeff)
    variables: tuple

    def __post_init__(self):
        acc = {}
        for e, c in self.terms:
            e = tuple(int(x) for x in e)
            if len(e) != len(self.variables):
                raise ValueError("exponent vector length differs from the variable count")
            acc[e] = acc.get(e, 0) + int(c)
        object.__setattr__(self, "terms", tuple(sorted((e, c) for e, c in acc.items() if c)))
        object.__setattr__(self, "variables", tuple(self.variables))

    @classmethod
    def from_dict(cls, coeffs, variables):
        return cls(tuple(coeffs.items()), tuple(variables))

    @property
    def d(self):
        return len(self.variables)

    def as_dict(self):
        return dict(self.terms)

    def support(self):
        return [e for e, _ in self.terms]

    def is_zero(self):
        return not self.terms

    def restrict(self, S):
        """f_S: set x_i = 0 for i outside S."""
        S = set(S)
        return Poly(tuple((e, c) for e, c in self.terms
                          if all(x == 0 or i in S for i, x in enumerate(e))), self.variables)

    def derivative(self, i):
        out = []
        for e, c in self.terms:
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                out.append((tuple(ne), c * e[i]))
        return Poly(tuple(out), self.variables)

    def evaluate(self, point, one=1):
        total = 0
        for e, c in self.terms:
            v = c * one
            for x, k in zip(point, e):
                if k:
                    v = v * x ** k
            total = total + v
        return total

    def __str__(self):
        return format_poly(self.terms, self.variables)


def _mono(e, names):
    parts = []
    for n, k in zip(names, e):
        if k == 1:
            parts.append(n)
        elif k:
            parts.append(f"{n}^{k}")
    return "*".join(parts)


def format_poly(terms, names, latex=False):
    out = []
    for e, c in sorted(terms, key=lambda t: tuple(-x for x in t[0])):
        m = _mono(e, names)
        if latex:
            m = re.sub(r"\^(\d+)", r"^{\1}", m).replace("*", " ")
        mag = abs(c)
        if not m:
            body = str(mag)
        elif mag == 1:
            body = m
        else:
            body = f"{mag}{' ' if latex else '*'}{m}"
        out.append(("-" if c < 0 else "+", body))
    if not out:
        return "0"
    s = ("-" if out[0][0] == "-" else "") + out[0][1]
    for sgn, body in out[1:]:
        s += f" {sgn} {body}"
    return s


_TOK = re.compile(r"\s*(?:(\d+)|([A-Za-z]\d*)|(\^)|(\*)|([+-]))")


def _natural_key(name):
    m = re.match(r"([A-Za-z])(\d*)", name)
    return (m.group(1), int(m.group(2) or 0))


def parse_poly(text, variables=None):
    """Parse ``"x^2 + 3*y^3 - xy"``.

    A variable is one letter optionally followed by digits, so ``xy`` is x*y
    and ``x2`` is a variable of its own.  Variables are ordered alphabetically
    unless ``variables`` is given.
    """
    toks = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        mt = _TOK.match(text, pos)
        if not mt or mt.end() == pos:
            pos += len(text[pos:]) - len(text[pos:].lstrip())
            raise PolySyntaxError(f"unexpected character {text[pos]!r} at position {pos}")
        toks.append((mt.lastindex, mt.group(mt.lastindex), mt.start(mt.lastindex)))
        pos = mt.end()
    if not toks:
        raise PolySyntaxError("empty polynomial")
    raw_terms = []
    i = 0
    while i < len(toks):
        sign = 1
        while i < len(toks) and toks[i][0] == 5:
            if toks[i][1] == "-":
                sign = -sign
            i += 1
        coeff = sign
        powers = {}
        seen_factor = False
        expect_factor = True
        while i < len(toks) and toks[i][0] != 5:
            kind, val, at = toks[i]
            if kind == 4:
                if expect_factor:
                    raise PolySyntaxError(f"misplaced '*' at position {at}")
                expect_factor = True
                i += 1
                continue
            if kind == 1:
                coeff *= int(val)
                i += 1
            elif kind == 2:
                k = 1
                i += 1
                if i < len(toks) and toks[i][0] == 3:
                    if i + 1 >= len(toks) or toks[i + 1][0] != 1:
                        raise PolySyntaxError(f"exponent expected after '^' at position {toks[i][2]}")
                    k = int(toks[i + 1][1])
                    i += 2
                powers[val] = powers.get(val, 0) + k
            else:
                raise PolySyntaxError(f"unexpected {val!r} at position {at}")
            seen_factor = True
            expect_factor = False
        if not seen_factor or expect_factor:
            raise PolySyntaxError("dangling operator")
        raw_terms.append((coeff, powers))
    names = set(variables or ())
    for _, pw in raw_terms:
        names |= set(pw)
    if variables is None:
        variables = sorted(names, key=_natural_key)
    elif names - set(variables):
        raise PolySyntaxError(f"unknown variables {sorted(names - set(variables))}")
    variables = tuple(variables)
    if not variables:
        raise ConstantTerm("polynomial has no variables")
    terms = {}
    for c, pw in raw_terms:
        e = tuple(pw.get(v, 0) for v in variables)
        terms[e] = terms.get(e, 0) + c
    f = Poly(tuple(terms.items()), variables)
    if f.is_zero():
        raise PolySyntaxError("polynomial is identically zero")
    zero = (0,) * f.d
    if any(e == zero for e, _ in f.terms):
        raise ConstantTerm("f(0) must be 0")
    return f
