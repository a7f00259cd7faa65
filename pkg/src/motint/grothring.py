"""Classes of varieties: polynomials in L (with L inverted) over opaque torus symbols.

A ``VarietySymbol`` names a closed subvariety of a split torus cut out by Laurent
polynomials.  A ``VClass`` is a finite integer combination of monomials
``L^k * S_1 * ... * S_r``.  Rational functions in T over this ring live in
``tseries.TRational``; those with every denominator factor ``1 - L^a T^b``,
``b > 0``, form the ring on which ``neg_lim`` is defined.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import factorial, lcm

import numpy as np

from .errors import (BadPrime, NonIntegralExponent, NondegeneracyUnknown,
                     NotPolynomial, PoleAtInfinity, TooLarge, Unsupported)
from .tseries import TRational

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
DEFAULT_CAP = 10 ** 7

DaggerRF = TRational


# ---------------------------------------------------------------------------
# symbols

@dataclass(frozen=True)
class VarietySymbol:
    """{ξ ∈ G_m^n : e(ξ) = 0 for each equation e}.

    Equations are tuples of ``(exponents, coefficient)`` pairs.  ``action_order``
    is the order of the finite cyclic group acting on the variety; point counts
    only make sense at primes p ≡ 1 modulo it.
    """
    name: str
    torus_dim: int
    equations: tuple = ()
    action_order: int = 1
    nondegenerate: bool | None = None
    latex: str | None = None

    def definition(self):
        return (self.torus_dim, self.equations, self.action_order, self.nondegenerate)

    def to_json(self):
        return {"name": self.name, "torus_dim": self.torus_dim,
                "equations": [[[list(e), c] for e, c in eqn] for eqn in self.equations],
                "action_order": self.action_order, "nondegenerate": self.nondegenerate,
                "latex": self.latex}


_REGISTRY = {}


def register_symbol(name, torus_dim, equations=(), action_order=1, nondegenerate=None,
                    latex=None):
    """Register (or look up) a symbol; a clashing definition gets a fresh suffix."""
    eqs = tuple(tuple(sorted((tuple(int(x) for x in e), int(c)) for e, c in eqn if c))
                for eqn in equations)
    sym = VarietySymbol(name, int(torus_dim), eqs, int(action_order), nondegenerate, latex)
    base, n = name, 1
    while name in _REGISTRY:
        old = _REGISTRY[name]
        if old.definition() == sym.definition():
            return old
        n += 1
        name = f"{base}#{n}"
        sym = VarietySymbol(name, sym.torus_dim, eqs, sym.action_order, nondegenerate,
                            None if latex is None else f"{latex}_{{({n})}}")
    _REGISTRY[name] = sym
    return sym


def get_symbol(name):
    try:
        return _REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown variety symbol {name!r}") from None


def symbol_from_json(obj):
    return register_symbol(obj["name"], obj["torus_dim"],
                           [[(tuple(e), c) for e, c in eqn] for eqn in obj["equations"]],
                           obj.get("action_order", 1), obj.get("nondegenerate"),
                           obj.get("latex"))


# ---------------------------------------------------------------------------
# the ring

class VClass:
    """Element of Z[L, L^-1][symbols]; immutable and hashable."""
    __slots__ = ("_t", "_h")

    def __init__(self, terms=None):
        t = {}
        for key, c in (terms or {}).items():
            if c:
                syms, k = key
                key = (tuple(sorted(syms)), int(k))
                t[key] = t.get(key, 0) + int(c)
                if not t[key]:
                    del t[key]
        self._t = t
        self._h = None

    # constructors
    @classmethod
    def const(cls, n):
        return cls({((), 0): n})

    @classmethod
    def one(cls):
        return cls.const(1)

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def L(cls, k=1):
        return cls({((), k): 1})

    @classmethod
    def Gm(cls, n=1):
        return (cls.L() - 1) ** n

    @classmethod
    def of(cls, sym):
        name = sym.name if isinstance(sym, VarietySymbol) else sym
        get_symbol(name)
        return cls({((name,), 0): 1})

    # access
    @property
    def terms(self):
        return dict(self._t)

    def sorted_terms(self):
        return sorted(self._t.items(), key=lambda kv: (len(kv[0][0]), kv[0][0], -kv[0][1]))

    def symbols(self):
        return sorted({s for syms, _ in self._t for s in syms})

    def is_zero(self):
        return not self._t

    def is_integer(self):
        return all(not syms and k == 0 for syms, k in self._t)

    # arithmetic
    def __add__(self, other):
        other = _vc(other)
        if other is NotImplemented:
            return other
        t = dict(self._t)
        for k, c in other._t.items():
            t[k] = t.get(k, 0) + c
        return VClass(t)

    __radd__ = __add__

    def __neg__(self):
        return VClass({k: -c for k, c in self._t.items()})

    def __sub__(self, other):
        other = _vc(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return _vc(other) - self

    def __mul__(self, other):
        if isinstance(other, TRational):
            return NotImplemented
        other = _vc(other)
        if other is NotImplemented:
            return other
        t = {}
        for (s1, k1), c1 in self._t.items():
            for (s2, k2), c2 in other._t.items():
                key = (tuple(sorted(s1 + s2)), k1 + k2)
                t[key] = t.get(key, 0) + c1 * c2
        return VClass(t)

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            if len(self._t) == 1:
                (syms, k), c = next(iter(self._t.items()))
                if not syms and c in (1, -1):
                    return VClass({((), k * n): c ** (-n)})
            raise NotPolynomial("only signed powers of L are invertible")
        out = VClass.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, TRational):
            return NotImplemented
        other = _vc(other)
        if other is NotImplemented:
            return False
        return self._t == other._t

    def __hash__(self):
        if self._h is None:
            self._h = hash(frozenset(self._t.items()))
        return self._h

    def __repr__(self):
        return f"VClass({render(self)!r})"

    def __str__(self):
        return render(self)

    # L-polynomial structure
    def groups(self):
        """symbol multiset -> {L exponent: coefficient}."""
        g = {}
        for (syms, k), c in self._t.items():
            g.setdefault(syms, {})[k] = c
        return g

    def divide_by_binomial(self, k):
        """Exact quotient by (1 - L^k); raises NotPolynomial otherwise."""
        if k == 0:
            raise ZeroDivisionError("1 - L^0 is zero")
        out = {}
        for syms, poly in self.groups().items():
            q = _div_binomial(poly, k)
            for e, c in q.items():
                out[(syms, e)] = c
        return VClass(out)

    def mul_lpow(self, k):
        return VClass({(s, e + k): c for (s, e), c in self._t.items()})

    def reduce_mod_L(self):
        """Image in the quotient by the ideal generated by L."""
        out = {}
        for (syms, k), c in self._t.items():
            if k < 0:
                raise NotPolynomial("L is inverted in this class; cannot reduce mod L")
            if k == 0:
                out[(syms, 0)] = c
        return VClass(out)

    def substitute_L(self, value):
        """Replace L by a number, symbols must be absent."""
        if any(syms for syms, _ in self._t):
            raise ValueError("class still contains variety symbols")
        return sum((Fraction(value) ** k * c for (_, k), c in self._t.items()), Fraction(0))


def _vc(x):
    if isinstance(x, VClass):
        return x
    if isinstance(x, bool):
        return NotImplemented
    if isinstance(x, int):
        return VClass.const(x)
    if isinstance(x, Fraction) and x.denominator == 1:
        return VClass.const(int(x))
    return NotImplemented


def _div_binomial(poly, k):
    """poly / (1 - L^k) for a Laurent polynomial {exp: coeff}."""
    if k < 0:
        # 1 - L^-j = -L^-j (1 - L^j)
        q = _div_binomial(poly, -k)
        return {e - k: -c for e, c in q.items()}
    lo, hi = min(poly), max(poly)
    q = {}
    for e in range(lo, hi - k + 1):
        v = poly.get(e, 0) + q.get(e - k, 0)
        if v:
            q[e] = v
    # verify
    back = dict(q)
    for e, c in q.items():
        back[e + k] = back.get(e + k, 0) - c
    back = {e: c for e, c in back.items() if c}
    if back != {e: c for e, c in poly.items() if c}:
        raise NotPolynomial(f"class is not divisible by 1 - L^{k}")
    return q


# ---------------------------------------------------------------------------
# behaviour at T = infinity

def lim_infinity(R):
    """Value at T = ∞ of a rational function in the dagger family."""
    if not R.in_dagger():
        raise ValueError("denominator has a factor without positive T-degree")
    if not R.num:
        return VClass.zero()
    n = R.exponent_denominator()
    num = {int(e * n): c for e, c in R.num.items()}
    den = [(a, int(b * n)) for a, b in R.den]
    total = sum(b for _, b in den)
    # In S = T^{-1/n}: R = sum_e c S^{total - e} / prod (S^b - L^a)
    q = {0: VClass.one()}
    for a, b in den:
        nq = {}
        for e, c in q.items():
            nq[e + b] = nq.get(e + b, 0) + c
            nq[e] = nq.get(e, 0) - c * VClass.L(a)
        q = {e: _vc_any(c) for e, c in nq.items() if c != 0}
    q0 = q.get(0)
    q0_terms = q0.terms
    (syms, k), c = next(iter(q0_terms.items()))
    if len(q0_terms) != 1 or syms or c not in (1, -1):
        raise AssertionError("constant term of the denominator is not a unit")
    inv0 = VClass({((), -k): c})
    lowest = min(total - e for e in num)
    depth = max(0, -lowest)
    inv = [inv0]
    for i in range(1, depth + 1):
        acc = VClass.zero()
        for j in range(1, i + 1):
            if j in q:
                acc = acc + q[j] * inv[i - j]
        inv.append(-(acc * inv0))
    coeff = {}
    for e, c in num.items():
        for i in range(depth + 1):
            s = total - e + i
            if s <= 0:
                coeff[s] = coeff.get(s, VClass.zero()) + _vc_any(c) * inv[i]
    for s, v in coeff.items():
        if s < 0 and not v.is_zero():
            raise PoleAtInfinity(f"pole of order {-s}/{n} at T = infinity")
    return coeff.get(0, VClass.zero())


def neg_lim(R):
    """-lim_{T→∞} R(T)."""
    return -lim_infinity(R)


def _vc_any(c):
    return c if isinstance(c, VClass) else VClass.const(int(c))


# ---------------------------------------------------------------------------
# coefficient streams and Hadamard products

class CoeffStream:
    """Sequence c_1, c_2, ... of classes, optionally with a periodic-geometric closed form.

    The closed form means c_m = values[m mod period] * L^(ratio * m).
    """

    def __init__(self, fn, values=None, ratio=Fraction(0)):
        self._fn = fn
        self.values = None if values is None else tuple(_vc_any(v) for v in values)
        self.ratio = Fraction(ratio)
        if self.values is not None:
            p = len(self.values)
            for r, v in enumerate(self.values):
                if not v.is_zero():
                    m = r if r else p
                    if (self.ratio * m).denominator != 1 or (self.ratio * p).denominator != 1:
                        raise NonIntegralExponent("closed form has fractional L exponents")

    @classmethod
    def periodic_geometric(cls, values, ratio=0):
        values = tuple(_vc_any(v) for v in values)
        ratio = Fraction(ratio)
        p = len(values)

        def fn(m):
            v = values[m % p]
            if v.is_zero():
                return v
            return v.mul_lpow(int(ratio * m))
        return cls(fn, values, ratio)

    @classmethod
    def constant(cls, v):
        return cls.periodic_geometric((v,), 0)

    def coeff(self, m):
        return _vc_any(self._fn(m))

    def take(self, n):
        return [self.coeff(m) for m in range(1, n + 1)]

    def closed_form(self):
        if self.values is None:
            return None
        p = len(self.values)
        num = {}
        for r in range(1, p + 1):
            v = self.values[r % p]
            if not v.is_zero():
                num[Fraction(r)] = v.mul_lpow(int(self.ratio * r))
        return TRational(num, ((int(self.ratio * p), p),))


def hadamard(a, b):
    """Coefficientwise product of two streams."""
    fn = lambda m: a.coeff(m) * b.coeff(m)  # noqa: E731
    if a.values is not None and b.values is not None:
        p = lcm(len(a.values), len(b.values))
        vals = [a.values[r % len(a.values)] * b.values[r % len(b.values)] for r in range(p)]
        return CoeffStream(fn, vals, a.ratio + b.ratio)
    return CoeffStream(fn)


# ---------------------------------------------------------------------------
# evaluations

_COUNT_CACHE = {}


def _eval_mod(eqn, grids_pow, shape, p):
    total = np.zeros(shape, dtype=np.int64)
    for exps, c in eqn:
        term = np.full(shape, c % p, dtype=np.int64)
        for i, e in enumerate(exps):
            if e % (p - 1):
                term = (term * grids_pow[i][e % (p - 1)]) % p
        total = (total + term) % p
    return total


def symbol_point_count(sym, p, cap=DEFAULT_CAP):
    key = (sym.name, sym.definition(), p)
    if key in _COUNT_CACHE:
        return _COUNT_CACHE[key]
    if (p - 1) % sym.action_order:
        raise BadPrime(f"p = {p} is not 1 mod {sym.action_order} for {sym.name}")
    n = sym.torus_dim
    if (p - 1) ** n > cap:
        raise TooLarge(f"counting {sym.name} over F_{p} needs {(p - 1) ** n} points")
    if not sym.equations:
        count = (p - 1) ** n
    elif n == 0:
        count = int(all(sum(c for _, c in eqn) % p == 0 for eqn in sym.equations))
    else:
        # chunk over the first coordinate to bound memory
        vals = np.arange(1, p, dtype=np.int64)
        exps_needed = sorted({e % (p - 1) for eqn in sym.equations for ex, _ in eqn for e in ex})
        count = 0
        for x0 in vals:
            axes = [np.array([x0], dtype=np.int64)] + [vals] * (n - 1)
            grids = np.meshgrid(*axes, indexing="ij")
            grids_pow = []
            for g in grids:
                table = {}
                for e in exps_needed:
                    table[e] = _powmod(g, e, p)
                grids_pow.append(table)
            ok = None
            for eqn in sym.equations:
                z = _eval_mod(eqn, grids_pow, grids[0].shape, p) == 0
                ok = z if ok is None else (ok & z)
            count += int(ok.sum())
    _COUNT_CACHE[key] = count
    return count


def _powmod(g, e, p):
    out = np.ones_like(g)
    base = g % p
    while e:
        if e & 1:
            out = (out * base) % p
        base = (base * base) % p
        e >>= 1
    return out


def point_count(x, p, cap=DEFAULT_CAP):
    """Number of F_p points with L -> p (a Fraction when L is inverted)."""
    total = Fraction(0)
    for (syms, k), c in x.terms.items():
        v = Fraction(p) ** k * c
        for s in syms:
            v *= symbol_point_count(get_symbol(s), p, cap)
        total += v
    return total


def euler(x):
    """Topological Euler characteristic: L -> 1 and symbols -> their χ."""
    total = 0
    for (syms, _), c in x.terms.items():
        v = c
        for s in syms:
            v *= symbol_euler(get_symbol(s))
        total += v
    total = Fraction(total)
    if total.denominator != 1:
        raise ArithmeticError(f"non-integral Euler characteristic {total}")
    return int(total)


def symbol_euler(sym):
    n = sym.torus_dim
    if not sym.equations:
        return 1 if n == 0 else 0
    if len(sym.equations) > 1:
        raise Unsupported(f"{sym.name}: Euler characteristic of complete intersections")
    eqn = sym.equations[0]
    if n == 0:
        return int(sum(c for _, c in eqn) == 0)
    if n == 1:
        return _count_torus_roots(eqn)
    vol = newton_volume([e for e, _ in eqn], n)
    if vol == 0:
        return 0
    if sym.nondegenerate is not True:
        raise NondegeneracyUnknown(f"{sym.name}: nondegeneracy not established")
    return (-1) ** (n - 1) * factorial(n) * vol


def _count_torus_roots(eqn):
    """Distinct nonzero complex roots of a univariate Laurent polynomial."""
    lo = min(e[0] for e, _ in eqn)
    poly = {}
    for e, c in eqn:
        poly[e[0] - lo] = poly.get(e[0] - lo, 0) + c
    coeffs = [Fraction(poly.get(i, 0)) for i in range(max(poly) + 1)]
    if len(coeffs) == 1:
        return 0
    d = poly_gcd(coeffs, poly_deriv(coeffs))
    return (len(coeffs) - 1) - (len(d) - 1)


def poly_deriv(c):
    return [i * c[i] for i in range(1, len(c))] or [Fraction(0)]


def _trim(c):
    c = list(c)
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return c


def poly_gcd(a, b):
    """Monic gcd of two univariate polynomials (coefficient lists, low degree first)."""
    a, b = _trim(a), _trim(b)
    while any(b):
        _, r = poly_divmod(a, b)
        a, b = b, _trim(r)
    lead = a[-1]
    return [x / lead for x in a] if lead else a


def poly_divmod(a, b):
    a = [Fraction(x) for x in a]
    b = _trim([Fraction(x) for x in b])
    if len(a) < len(b):
        return [Fraction(0)], _trim(a)
    q = [Fraction(0)] * (len(a) - len(b) + 1)
    for shift in range(len(a) - len(b), -1, -1):
        f = a[shift + len(b) - 1] / b[-1]
        q[shift] = f
        for i, y in enumerate(b):
            a[i + shift] -= f * y
    return q, _trim(a[:len(b) - 1] or [Fraction(0)])


def newton_volume(points, n):
    """Exact n-dimensional volume of conv(points); 0 if lower-dimensional."""
    pts = sorted(set(tuple(int(x) for x in p) for p in points))
    if len(pts) <= n:
        return Fraction(0)
    base = pts[0]
    diffs = [[Fraction(x - y) for x, y in zip(p, base)] for p in pts[1:]]
    from .semilinear import _rank
    if _rank(diffs) < n:
        return Fraction(0)
    if n == 1:
        return Fraction(pts[-1][0] - pts[0][0])
    from scipy.spatial import ConvexHull
    hull = ConvexHull(np.array(pts, dtype=float))
    ref = pts[hull.vertices[0]]
    vol = Fraction(0)
    for simplex in hull.simplices:
        rows = [[pts[i][j] - ref[j] for j in range(n)] for i in simplex]
        vol += abs(_int_det(rows))
    return vol / factorial(n)


def _int_det(m):
    m = [[Fraction(x) for x in r] for r in m]
    n = len(m)
    det = Fraction(1)
    for col in range(n):
        piv = next((i for i in range(col, n) if m[i][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det *= m[col][col]
        for i in range(col + 1, n):
            f = m[i][col] / m[col][col]
            m[i] = [x - f * y for x, y in zip(m[i], m[col])]
    return det


# ---------------------------------------------------------------------------
# rendering and serialization

def _sym_text(name, latex=False):
    sym = get_symbol(name)
    if latex:
        return "[" + (sym.latex or r"\mathrm{" + name + "}") + "]"
    return f"[{name}]"


def _mono_text(syms, k, latex=False):
    parts = []
    if k:
        if latex:
            parts.append(r"\mathds{L}" + ("" if k == 1 else "^{%d}" % k))
        else:
            parts.append("L" if k == 1 else f"L^{k}")
    i = 0
    while i < len(syms):
        j = i
        while j < len(syms) and syms[j] == syms[i]:
            j += 1
        t = _sym_text(syms[i], latex)
        if j - i > 1:
            t += ("^{%d}" % (j - i)) if latex else f"^{j - i}"
        parts.append(t)
        i = j
    return (" " if latex else "*").join(parts)


def render(x, latex=False):
    if not isinstance(x, VClass):
        x = _vc_any(x)
    if x.is_zero():
        return "0"
    out = []
    for (syms, k), c in x.sorted_terms():
        mono = _mono_text(syms, k, latex)
        mag = abs(c)
        if mono:
            body = mono if mag == 1 else (f"{mag} {mono}" if latex else f"{mag}*{mono}")
        else:
            body = str(mag)
        out.append(("-" if c < 0 else "+", body))
    s = ("-" if out[0][0] == "-" else "") + out[0][1]
    for sgn, body in out[1:]:
        s += f" {sgn} {body}"
    return s


def to_latex(x):
    if isinstance(x, TRational):
        return render_rational(x, latex=True)
    return render(x, latex=True)


def _texp(e, latex):
    e = Fraction(e)
    if e == 1:
        return "T"
    s = str(e)
    return ("T^{%s}" % s) if latex else f"T^{s}" if e.denominator == 1 else f"T^({s})"


def render_rational(R, latex=False):
    terms = []
    for e, c in R.terms():
        c = _vc_any(c)
        coef = render(c, latex)
        if e == 0:
            terms.append(coef)
            continue
        t = _texp(e, latex)
        if c == 1:
            terms.append(t)
        elif c == -1:
            terms.append("-" + t)
        elif len(c.terms) == 1:
            terms.append(f"{coef} {t}" if latex else f"{coef}*{t}")
        else:
            terms.append(f"({coef}) {t}" if latex else f"({coef})*{t}")
    num = " + ".join(terms).replace("+ -", "- ") if terms else "0"
    if not R.den:
        return num
    facs = []
    for a, b in R.den:
        lp = "" if a == 0 else (_mono_text((), a, latex) + (" " if latex else "*"))
        facs.append(f"(1 - {lp}{_texp(b, latex)})")
    if latex:
        return r"\frac{%s}{%s}" % (num, "".join(facs))
    return f"({num}) / ({'*'.join(facs)})" if len(facs) > 1 else f"({num}) / {facs[0]}"


def _collect_symbols(x, into):
    for name in x.symbols():
        into[name] = get_symbol(name).to_json()


def vclass_to_json(x, with_schema=True):
    out = {"terms": [{"coeff": c, "L_power": k, "symbols": list(syms)}
                     for (syms, k), c in x.sorted_terms()]}
    syms = {}
    _collect_symbols(x, syms)
    out["symbols"] = syms
    if with_schema:
        out = {"schema_version": SCHEMA_VERSION, **out}
    return out


def vclass_from_json(obj):
    _check_schema(obj)
    for s in (obj.get("symbols") or {}).values():
        symbol_from_json(s)
    terms = {}
    for t in obj["terms"]:
        key = (tuple(t["symbols"]), t["L_power"])
        for s in key[0]:
            get_symbol(s)
        terms[key] = terms.get(key, 0) + t["coeff"]
    return VClass(terms)


def rational_to_json(R, with_schema=True):
    syms = {}
    num = []
    for e, c in R.terms():
        c = _vc_any(c)
        _collect_symbols(c, syms)
        num.append({"T": str(e), "coeff": vclass_to_json(c, with_schema=False)["terms"]})
    out = {"numerator": num,
           "denominator": [[a, str(b)] for a, b in R.den],
           "symbols": syms}
    if with_schema:
        out = {"schema_version": SCHEMA_VERSION, **out}
    return out


def rational_from_json(obj):
    _check_schema(obj)
    for s in (obj.get("symbols") or {}).values():
        symbol_from_json(s)
    num = {}
    for t in obj["numerator"]:
        num[Fraction(t["T"])] = vclass_from_json({"terms": t["coeff"]})
    return TRational(num, [(a, Fraction(b)) for a, b in obj["denominator"]])


def _check_schema(obj):
    v = obj.get("schema_version", SCHEMA_VERSION)
    if v != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema_version {v}")
