"""Rational functions in a formal variable T with rational exponents.

A ``TRational`` is ``N(T) / prod_i (1 - L^{a_i} T^{b_i})`` where ``N`` is a finite
sum of coefficient * T^e.  Coefficients are integers or ``VClass`` instances;
a denominator factor with ``a != 0`` needs the latter.
"""
from __future__ import annotations

from collections import Counter
from fractions import Fraction
from math import lcm

from .errors import NonIntegralExponent


def _lpow(a):
    if a == 0:
        return 1
    from .grothring import VClass
    return VClass.L(a)


def _is_zero(c):
    return c == 0


def _poly_mul(p, q):
    out = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = e1 + e2
            v = out.get(e, 0) + c1 * c2
            if _is_zero(v):
                out.pop(e, None)
            else:
                out[e] = v
    return out


def _poly_add(p, q, sign=1):
    out = dict(p)
    for e, c in q.items():
        v = out.get(e, 0) + (c if sign == 1 else -c)
        if _is_zero(v):
            out.pop(e, None)
        else:
            out[e] = v
    return out


def _factor_poly(a, b):
    """1 - L^a T^b as a T-polynomial."""
    return _poly_add({Fraction(0): 1}, {Fraction(b): _lpow(a)}, sign=-1)


class TRational:
    __slots__ = ("num", "den")

    def __init__(self, num=None, den=()):
        clean = {}
        for e, c in (num or {}).items():
            if not _is_zero(c):
                e = Fraction(e)
                clean[e] = clean.get(e, 0) + c
                if _is_zero(clean[e]):
                    del clean[e]
        self.num = clean
        facs = []
        for a, b in den:
            b = Fraction(b)
            if b == 0:
                raise ValueError("denominator factor must involve T")
            facs.append((int(a), b))
        self.den = tuple(sorted(facs))

    # constructors
    @classmethod
    def zero(cls):
        return cls({})

    @classmethod
    def const(cls, c):
        return cls({Fraction(0): c})

    @classmethod
    def monomial(cls, c, e):
        return cls({Fraction(e): c})

    # structure
    def in_dagger(self):
        return all(b > 0 for _, b in self.den)

    def is_polynomial(self):
        return not self.den

    def exponent_denominator(self):
        n = 1
        for e in self.num:
            n = lcm(n, e.denominator)
        for _, b in self.den:
            n = lcm(n, b.denominator)
        return n

    def den_poly(self):
        p = {Fraction(0): 1}
        for a, b in self.den:
            p = _poly_mul(p, _factor_poly(a, b))
        return p

    # arithmetic
    def _with_den(self, target):
        """Rewrite over the denominator multiset ``target`` (a superset of ours)."""
        have = Counter(self.den)
        need = Counter(target)
        extra = need - have
        if have - need:
            raise ValueError("target denominator does not contain ours")
        num = dict(self.num)
        for (a, b), k in sorted(extra.items()):
            for _ in range(k):
                num = _poly_mul(num, _factor_poly(a, b))
        return num

    def __add__(self, other):
        other = _coerce(other)
        c1, c2 = Counter(self.den), Counter(other.den)
        target = tuple(sorted((c1 | c2).elements()))
        return TRational(_poly_add(self._with_den(target), other._with_den(target)), target)

    __radd__ = __add__

    def __neg__(self):
        return TRational({e: -c for e, c in self.num.items()}, self.den)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, TRational):
            return TRational(_poly_mul(self.num, other.num), self.den + other.den)
        return TRational({e: c * other for e, c in self.num.items()}, self.den)

    __rmul__ = __mul__

    def shift(self, e):
        """Multiply by T^e."""
        e = Fraction(e)
        return TRational({k + e: c for k, c in self.num.items()}, self.den)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)) or not isinstance(other, TRational):
            try:
                other = _coerce(other)
            except TypeError:
                return NotImplemented
        lhs = _poly_mul(self.num, other.den_poly())
        rhs = _poly_mul(other.num, self.den_poly())
        return lhs == rhs

    __hash__ = None

    # expansion
    def expand(self, bound):
        """Series coefficients of T^e for e up to ``bound`` (ascending, dagger case)
        or down to ``bound`` (descending, all b < 0).  Returns dict exponent -> coeff.
        """
        if not self.den:
            return dict(self.num)
        pos = all(b > 0 for _, b in self.den)
        neg = all(b < 0 for _, b in self.den)
        if not (pos or neg):
            raise ValueError("mixed-direction denominator has no single expansion")
        bound = Fraction(bound)
        inside = (lambda e: e <= bound) if pos else (lambda e: e >= bound)
        series = {e: c for e, c in self.num.items() if inside(e)}
        for a, b in self.den:
            if not series:
                return {}
            if pos:
                nmax = (bound - min(series)) / b
            else:
                nmax = (bound - max(series)) / b
            # terms of 1/(1 - L^a T^b) = sum L^{an} T^{bn}
            geo = {b * n: _lpow(a * n) for n in range(int(nmax) + 1)}
            series = {e: c for e, c in _poly_mul(series, geo).items() if inside(e)}
        return series

    def coefficients(self, count):
        """c_1..c_count of the ascending power series (integral exponents only)."""
        s = self.expand(count)
        out = []
        for m in range(1, count + 1):
            out.append(s.get(Fraction(m), 0))
        for e in s:
            if e.denominator != 1:
                raise NonIntegralExponent(f"series has exponent {e}")
        return out

    # helpers for display
    def terms(self):
        return sorted(self.num.items())

    def __repr__(self):
        return f"TRational({self.terms()!r}, {self.den!r})"


def _coerce(x):
    if isinstance(x, TRational):
        return x
    if isinstance(x, (int, Fraction)) or hasattr(x, "terms"):
        return TRational.const(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to TRational")


def truncate_product(series, den, cap):
    """Numerator N = D * series keeping exponents <= cap (ascending direction)."""
    d = {Fraction(0): 1}
    for a, b in den:
        d = _poly_mul(d, _factor_poly(a, b))
    prod = _poly_mul(d, series)
    return {e: c for e, c in prod.items() if e <= cap}


def truncate_product_desc(series, den, cap):
    """Same as ``truncate_product`` for descending expansions; keeps e >= cap."""
    d = {Fraction(0): 1}
    for a, b in den:
        d = _poly_mul(d, _factor_poly(a, b))
    prod = _poly_mul(d, series)
    return {e: c for e, c in prod.items() if e >= cap}
