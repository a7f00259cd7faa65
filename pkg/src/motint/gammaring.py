"""Integer-valued step functions on the value group Q under Euler-characteristic convolution.

A step function is stored by its breakpoints b_1 < ... < b_n together with the
2n+1 values it takes on (-inf, b_1), {b_1}, (b_1, b_2), ..., {b_n}, (b_n, inf).
Redundant breakpoints are dropped, which makes the representation canonical.

Named generators: ``p(γ)`` the indicator of {γ}, ``q(γ)`` of (γ, ∞), ``r`` of
all of Q, and ``o(γ)`` of the open interval between 0 and γ (with o(0) = -p(0)).
"""
from __future__ import annotations

import re
from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction

from .errors import NotInSpan, Unbounded
from .grothring import VClass
from .semilinear import (AffineForm, as_rat, chi_b, chi_g,
                         chi_interval, eq)


@dataclass(frozen=True)
class StepFn:
    breaks: tuple = ()
    vals: tuple = (0,)

    def __post_init__(self):
        br = tuple(as_rat(b) for b in self.breaks)
        vals = tuple(int(v) for v in self.vals)
        if len(vals) != 2 * len(br) + 1:
            raise ValueError("need 2n+1 values for n breakpoints")
        if any(a >= b for a, b in zip(br, br[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        keep_b, keep_v = [], [vals[0]]
        for i, b in enumerate(br):
            left, at, right = keep_v[-1], vals[2 * i + 1], vals[2 * i + 2]
            if left == at == right:
                continue
            keep_b.append(b)
            keep_v += [at, right]
        object.__setattr__(self, "breaks", tuple(keep_b))
        object.__setattr__(self, "vals", tuple(keep_v))

    # evaluation and pieces
    def __call__(self, x):
        x = as_rat(x)
        i = bisect_left(self.breaks, x)
        if i < len(self.breaks) and self.breaks[i] == x:
            return self.vals[2 * i + 1]
        return self.vals[2 * i]

    def pieces(self):
        """[(lo, hi, lo_closed, hi_closed, value)] for the nonzero pieces."""
        out = []
        b = self.breaks
        for i, v in enumerate(self.vals):
            if not v:
                continue
            if i % 2:
                x = b[i // 2]
                out.append((x, x, True, True, v))
            else:
                lo = b[i // 2 - 1] if i else None
                hi = b[i // 2] if i // 2 < len(b) else None
                out.append((lo, hi, False, False, v))
        return out

    def is_db(self):
        return self.vals[0] == 0 and self.vals[-1] == 0

    def is_zero(self):
        return self.vals == (0,)

    # ring structure (pointwise additive)
    def _combine(self, other, op):
        br = sorted(set(self.breaks) | set(other.breaks))
        vals = []
        for i in range(2 * len(br) + 1):
            if i % 2:
                x = br[i // 2]
            else:
                x = _interior_sample(br, i // 2)
            vals.append(op(self(x), other(x)))
        return StepFn(tuple(br), tuple(vals))

    def __add__(self, other):
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a - b)

    def __neg__(self):
        return StepFn(self.breaks, tuple(-v for v in self.vals))

    def __mul__(self, n):
        if isinstance(n, StepFn):
            raise TypeError("use conv() for the ring product")
        return StepFn(self.breaks, tuple(n * v for v in self.vals))

    __rmul__ = __mul__

    def shift(self, a):
        a = as_rat(a)
        return StepFn(tuple(b + a for b in self.breaks), self.vals)

    def __str__(self):
        return render(self)


def _interior_sample(br, i):
    """A point of the i-th open interval determined by sorted breakpoints."""
    if not br:
        return Fraction(0)
    if i == 0:
        return br[0] - 1
    if i == len(br):
        return br[-1] + 1
    return (br[i - 1] + br[i]) / 2


# generators

def p(g):
    return StepFn((as_rat(g),), (0, 1, 0))


def q(g):
    return StepFn((as_rat(g),), (0, 0, 1))


def r():
    return StepFn((), (1,))


def o(g):
    g = as_rat(g)
    if g == 0:
        return -p(0)
    lo, hi = sorted((Fraction(0), g))
    return StepFn((lo, hi), (0, 0, 1, 0, 0))


basis_p, basis_q, basis_r, basis_o = p, q, r, o


def zero():
    return StepFn()


def one():
    return p(0)


# ---------------------------------------------------------------------------
# convolution

def _reflect(piece, g):
    lo, hi, lc, hc, v = piece
    nlo = None if hi is None else g - hi
    nhi = None if lo is None else g - lo
    return nlo, nhi, hc, lc, v


def _meet(a, b):
    lo1, hi1, lc1, hc1 = a
    lo2, hi2, lc2, hc2 = b
    if lo1 is None:
        lo, lc = lo2, lc2
    elif lo2 is None or lo1 > lo2:
        lo, lc = lo1, lc1
    elif lo2 > lo1:
        lo, lc = lo2, lc2
    else:
        lo, lc = lo1, lc1 and lc2
    if hi1 is None:
        hi, hc = hi2, hc2
    elif hi2 is None or hi1 < hi2:
        hi, hc = hi1, hc1
    elif hi2 < hi1:
        hi, hc = hi2, hc2
    else:
        hi, hc = hi1, hc1 and hc2
    return lo, hi, lc, hc


def _conv_at(f_pieces, g_pieces, gamma, variant):
    total = 0
    for a in f_pieces:
        for b in g_pieces:
            lo, hi, lc, hc, vb = _reflect(b, gamma)
            m = _meet(a[:4], (lo, hi, lc, hc))
            total += a[4] * vb * chi_interval(*m, variant=variant)
    return total


def conv(f, g, variant="g"):
    """(f*g)(γ) = Σ_m m·χ({α : f(α) g(γ-α) = m})."""
    if variant not in ("g", "b"):
        raise ValueError("variant must be 'g' or 'b'")
    fp, gp = f.pieces(), g.pieces()
    cands = sorted({a + b for a in f.breaks for b in g.breaks})
    if not cands:
        return StepFn((), (_conv_at(fp, gp, Fraction(0), variant),))
    vals = []
    for i in range(2 * len(cands) + 1):
        x = cands[i // 2] if i % 2 else _interior_sample(cands, i // 2)
        vals.append(_conv_at(fp, gp, x, variant))
    return StepFn(tuple(cands), tuple(vals))


def conv_power(f, n, variant="g"):
    out = one()
    for _ in range(n):
        out = conv(out, f, variant)
    return out


def relation_case(alpha, beta, variant="g"):
    """Which of the listed identities expresses p(α)*o(β) in the o/p basis.

    Returns 1, 2 or 3 for
      1: o(α+β) - o(α) - p(α)
      2: -o(α+β) + o(α) - p(α+β)
      3: o(α+β) + o(α) + p(0)
    """
    lhs = conv(p(alpha), o(beta), variant)
    a, b = as_rat(alpha), as_rat(beta)
    cands = {1: o(a + b) - o(a) - p(a),
             2: -o(a + b) + o(a) - p(a + b),
             3: o(a + b) + o(a) + p(0)}
    hits = [k for k, v in cands.items() if v == lhs]
    if not hits:
        raise AssertionError(f"no listed identity matches p({a})*o({b})")
    return hits[0]


def oo_case(alpha, beta, variant="g"):
    """1 if o(α)*o(β) = -o(α+β), 2 if it equals -o(α) - o(β) - p(0)."""
    lhs = conv(o(alpha), o(beta), variant)
    a, b = as_rat(alpha), as_rat(beta)
    if lhs == -o(a + b):
        return 1
    if lhs == -o(a) - o(b) - p(0):
        return 2
    raise AssertionError(f"no listed identity matches o({a})*o({b})")


# ---------------------------------------------------------------------------
# decompositions

def decompose_rpq(f):
    """Coefficients in the generators r, p(γ), q(γ): {"r": c, ("p", γ): c, ("q", γ): c}."""
    out = {}
    if f.vals[0]:
        out["r"] = f.vals[0]
    for i, b in enumerate(f.breaks):
        left, at, right = f.vals[2 * i], f.vals[2 * i + 1], f.vals[2 * i + 2]
        if at - left:
            out[("p", b)] = at - left
        if right - left:
            out[("q", b)] = right - left
    return out


def decompose_po(f):
    """Coefficients in p(γ) and o(γ) for doubly bounded f."""
    if not f.is_db():
        raise Unbounded("function does not have doubly bounded support")
    out = {}

    def add(key, c):
        if c:
            out[key] = out.get(key, 0) + c
            if not out[key]:
                del out[key]

    for lo, hi, lc, hc, v in f.pieces():
        if lo == hi:
            add(("p", lo), v)
        elif lo >= 0:
            # (lo, hi) = o(hi) - o(lo) - p(lo)
            add(("o", hi), v)
            if lo:
                add(("o", lo), -v)
                add(("p", lo), -v)
        elif hi <= 0:
            add(("o", lo), v)
            if hi:
                add(("o", hi), -v)
                add(("p", hi), -v)
        else:
            add(("o", lo), v)
            add(("o", hi), v)
            add(("p", Fraction(0)), v)
    return out


def from_terms(terms):
    f = zero()
    gens = {"p": p, "q": q, "o": o}
    for key, c in terms.items():
        g = r() if key == "r" else gens[key[0]](key[1])
        f = f + g * c
    return f


def chi_quotient(f):
    """Image under p ↦ 1, o ↦ -1 (χ of the support, weighted)."""
    if not f.is_db():
        raise Unbounded("function does not have doubly bounded support")
    return sum(v * (1 if lo == hi else -1) for lo, hi, _, _, v in f.pieces())


# ---------------------------------------------------------------------------
# weighted classes and the maps ψ

@dataclass(frozen=True)
class WClass:
    """Combination Σ c_i [(V_i, w_i)] of graded classes with Q-weights."""
    grade: int
    terms: tuple = ()

    def __post_init__(self):
        acc = {}
        for w, v in self.terms:
            w = as_rat(w)
            acc[w] = acc.get(w, VClass.zero()) + v
        object.__setattr__(self, "terms",
                           tuple(sorted((w, v) for w, v in acc.items() if not v.is_zero())))

    def __add__(self, other):
        if self.grade != other.grade and self.terms and other.terms:
            raise ValueError("adding weighted classes of different grades")
        return WClass(max(self.grade, other.grade), self.terms + other.terms)

    def __neg__(self):
        return WClass(self.grade, tuple((w, -v) for w, v in self.terms))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, WClass):
            return WClass(self.grade + other.grade,
                          tuple((w1 + w2, v1 * v2) for w1, v1 in self.terms
                                for w2, v2 in other.terms))
        return WClass(self.grade, tuple((w, v * other) for w, v in self.terms))

    __rmul__ = __mul__

    def reduce_mod_L(self):
        return WClass(self.grade, tuple((w, v.reduce_mod_L()) for w, v in self.terms))

    def is_zero(self):
        return not self.terms

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"({v}, {w})" for w, v in self.terms)


def psi(f, k, reduce=True):
    """p(γ)X^k ↦ Gm^(k-1)[(G_m, γ)], q(γ)X^k ↦ Gm^(k-1)[({1}, γ)], r X^k ↦ 0.

    The target is taken modulo L (``reduce=False`` keeps the raw image, which
    is not multiplicative).  For k = 0 the generator p(γ) is the weighted point.
    """
    gm = VClass.Gm()
    if k == 0:
        out = WClass(0)
        for key, c in decompose_rpq(f).items():
            if key == "r" or key[0] == "q":
                if key == "r" or c:
                    raise NotInSpan("grade 0 only contains combinations of p(γ)")
            else:
                out = out + WClass(0, ((key[1], VClass.const(c)),))
        return out
    base = gm ** (k - 1)
    out = WClass(k)
    for key, c in decompose_rpq(f).items():
        if key == "r":
            continue
        cls = gm if key[0] == "p" else VClass.one()
        out = out + WClass(k, ((key[1], base * cls * c),))
    return out.reduce_mod_L() if reduce else out


def psi_db(f, k):
    """[(I, μ)] ↦ χ(I)·Gm^k on doubly bounded functions."""
    return VClass.Gm(k) * chi_quotient(f)


# ---------------------------------------------------------------------------
# step functions from weighted semilinear sets

def step_from_weighted(I, mu, variant="g"):
    """λ(γ) = χ({x ∈ I : μ(x) + Σx = γ})."""
    k = I.ambient_dim
    muI = mu + AffineForm.coordinate_sum(k)
    cands = set()
    for cell in I.normalized_cells:
        for v in cell.vertices():
            cands.add(muI(v))
    chi = chi_g if variant == "g" else chi_b

    def at(g):
        fiber = I.with_constraints([eq(muI, AffineForm.constant(k, g))])
        return chi(fiber)
    cands = sorted(cands)
    if not cands:
        return StepFn((), (at(Fraction(0)),))
    vals = []
    for i in range(2 * len(cands) + 1):
        x = cands[i // 2] if i % 2 else _interior_sample(cands, i // 2)
        vals.append(at(x))
    return StepFn(tuple(cands), tuple(vals))


# ---------------------------------------------------------------------------
# text form

_GEN = re.compile(r"\s*(?:([pqo])\(\s*(-?\d+(?:/\d+)?)\s*\)|(r)\b|(\d+)|([-+*()]))")


def render(f):
    terms = decompose_rpq(f)
    if not terms:
        return "0"
    parts = []
    for key in sorted(terms, key=lambda k: (k != "r", str(k[0]) if k != "r" else "", k[1] if k != "r" else 0)):
        c = terms[key]
        name = "r" if key == "r" else f"{key[0]}({key[1]})"
        mag = abs(c)
        body = name if mag == 1 else f"{mag}*{name}"
        parts.append(("-" if c < 0 else "+", body))
    s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sgn, body in parts[1:]:
        s += f" {sgn} {body}"
    return s


def parse_expr(text, variant="g"):
    """Evaluate an expression like ``p(1/2)*o(1/3) + 2*q(0)``; ``*`` between
    step functions is convolution with the chosen χ."""
    toks = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        mt = _GEN.match(text, pos)
        if not mt or mt.end() == pos:
            raise ValueError(f"cannot parse {text[pos:]!r}")
        toks.append(mt)
        pos = mt.end()
    i = 0

    def peek():
        return toks[i] if i < len(toks) else None

    def atom():
        nonlocal i
        t = peek()
        if t is None:
            raise ValueError("unexpected end of expression")
        i += 1
        if t.group(1):
            return {"p": p, "q": q, "o": o}[t.group(1)](Fraction(t.group(2)))
        if t.group(3):
            return r()
        if t.group(4):
            return int(t.group(4))
        if t.group(5) == "(":
            v = expr()
            if peek() is None or peek().group(5) != ")":
                raise ValueError("expected ')'")
            i += 1
            return v
        if t.group(5) == "-":
            return _neg(atom())
        raise ValueError(f"unexpected {t.group(0)!r}")

    def term():
        nonlocal i
        v = atom()
        while peek() is not None and peek().group(5) == "*":
            i += 1
            w = atom()
            v = _times(v, w, variant)
        return v

    def expr():
        nonlocal i
        v = term()
        while peek() is not None and peek().group(5) in ("+", "-"):
            op = peek().group(5)
            i += 1
            w = term()
            v = _plus(v, w if op == "+" else _neg(w))
        return v

    v = expr()
    if i != len(toks):
        raise ValueError(f"trailing input {toks[i].group(0)!r}")
    return v if isinstance(v, StepFn) else p(0) * v


def _neg(v):
    return -v


def _plus(a, b):
    if isinstance(a, int):
        a = p(0) * a
    if isinstance(b, int):
        b = p(0) * b
    return a + b


def _times(a, b, variant):
    if isinstance(a, int) or isinstance(b, int):
        return a * b
    return conv(a, b, variant)
