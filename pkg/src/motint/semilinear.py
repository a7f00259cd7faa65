"""Semilinear subsets of Q^k.

A set is a finite union of cells; a cell is a conjunction of linear constraints
``form(g) rel 0`` with ``rel`` one of ``<``, ``<=``, ``=``.  Everything is exact:
coefficients are ``Fraction`` and feasibility is decided by Fourier-Motzkin
elimination with strictness tracking.

``normalize`` rewrites a set as a disjoint union of relatively open cylindrical
cells.  Each such cell is a tower of levels; level ``i`` is either a section
``g_i = s(g_<i)`` or a sector ``lo(g_<i) < g_i < hi(g_<i)`` with either bound
possibly absent.  Both Euler characteristics and all lattice computations run
on that form.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from math import ceil, floor, gcd, lcm

from .errors import (DimensionMismatch, DivergentSum, InfiniteLattice,
                     NotUnimodular, RegionSyntaxError)

Rat = Fraction
RELS = ("<", "<=", "=")


def as_rat(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


# ---------------------------------------------------------------------------
# affine forms and constraints

@dataclass(frozen=True)
class AffineForm:
    coeffs: tuple
    const: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(as_rat(c) for c in self.coeffs))
        object.__setattr__(self, "const", as_rat(self.const))

    @property
    def dim(self):
        return len(self.coeffs)

    @classmethod
    def zero(cls, k):
        return cls((0,) * k, 0)

    @classmethod
    def constant(cls, k, c):
        return cls((0,) * k, c)

    @classmethod
    def coordinate(cls, k, i):
        return cls(tuple(1 if j == i else 0 for j in range(k)), 0)

    @classmethod
    def coordinate_sum(cls, k, idx=None):
        idx = range(k) if idx is None else idx
        return cls(tuple(1 if j in idx else 0 for j in range(k)), 0)

    def __call__(self, point):
        if len(point) < len(self.coeffs):
            # prefix evaluation; trailing coefficients must vanish
            if any(self.coeffs[len(point):]):
                raise DimensionMismatch("form depends on unassigned coordinates")
        return sum((c * p for c, p in zip(self.coeffs, point) if c), self.const)

    def _check(self, other):
        if other.dim != self.dim:
            raise DimensionMismatch(f"forms of dimension {self.dim} and {other.dim}")

    def __add__(self, other):
        if isinstance(other, AffineForm):
            self._check(other)
            return AffineForm(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)),
                              self.const + other.const)
        return AffineForm(self.coeffs, self.const + as_rat(other))

    __radd__ = __add__

    def __neg__(self):
        return AffineForm(tuple(-a for a in self.coeffs), -self.const)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, s):
        s = as_rat(s)
        return AffineForm(tuple(a * s for a in self.coeffs), self.const * s)

    __rmul__ = __mul__

    def __truediv__(self, s):
        return self * (1 / as_rat(s))

    def is_constant(self):
        return not any(self.coeffs)

    def linear(self):
        return AffineForm(self.coeffs, 0)

    def lift(self, k, offset=0):
        """Embed into Q^k, placing our coordinates at ``offset``."""
        c = [Fraction(0)] * k
        c[offset:offset + self.dim] = self.coeffs
        return AffineForm(tuple(c), self.const)

    def substitute(self, j, expr):
        """Replace coordinate ``j`` by the affine form ``expr``."""
        a = self.coeffs[j]
        if a == 0:
            return self
        base = AffineForm(tuple(0 if i == j else c for i, c in enumerate(self.coeffs)), self.const)
        return base + expr * a

    def __str__(self):
        return format_form(self)


def format_form(form, names=None):
    names = names or [f"g{i + 1}" for i in range(form.dim)]
    parts = []
    for c, n in zip(form.coeffs, names):
        if c == 0:
            continue
        mag = abs(c)
        term = n if mag == 1 else f"{mag}*{n}"
        parts.append(("-" if c < 0 else "+", term))
    if form.const != 0 or not parts:
        parts.append(("-" if form.const < 0 else "+", str(abs(form.const))))
    out = ""
    for i, (sgn, term) in enumerate(parts):
        if i == 0:
            out = term if sgn == "+" else "-" + term
        else:
            out += f" {sgn} {term}"
    return out


@dataclass(frozen=True)
class LinConstraint:
    """``form(g) rel 0``."""
    form: AffineForm
    rel: str

    def __post_init__(self):
        if self.rel not in RELS:
            raise ValueError(f"unknown relation {self.rel!r}")

    def holds(self, point):
        v = self.form(point)
        if self.rel == "<":
            return v < 0
        if self.rel == "<=":
            return v <= 0
        return v == 0

    def raw(self):
        return (self.form.coeffs, self.form.const, self.rel)

    def __str__(self):
        return f"{format_form(self.form)} {self.rel} 0"


def format_constraint(con, names=None):
    """``2*g1 = 1`` style: constant on the right, positive leading coefficient."""
    form, rel = con.form, con.rel
    lead = next((c for c in form.coeffs if c), 0)
    flip = lead < 0
    if flip:
        form = -form
    lhs = format_form(form.linear(), names)
    op = {"<": ">" if flip else "<", "<=": ">=" if flip else "<=", "=": "="}[rel]
    return f"{lhs} {op} {-form.const}"


def describe_set(S, names=None):
    """Readable text for S, dropping constraints implied by the others."""
    parts = []
    for cell in S.cells:
        cons = list(cell.constraints)
        keep = []
        for i, con in enumerate(cons):
            others = keep + cons[i + 1:]
            if con.rel == "=":
                keep.append(con)
                continue
            neg = LinConstraint(-con.form, "<=" if con.rel == "<" else "<")
            if find_point([c.raw() for c in others + [neg]], cell.ambient_dim) is not None:
                keep.append(con)
        parts.append(" & ".join(format_constraint(c, names) for c in keep) or "true")
    if not parts:
        return "empty"
    return " | ".join(parts) if len(parts) == 1 else " | ".join(f"({p})" for p in parts)


def lt(a, b):
    return LinConstraint(a - b, "<")


def le(a, b):
    return LinConstraint(a - b, "<=")


def eq(a, b):
    return LinConstraint(a - b, "=")


# ---------------------------------------------------------------------------
# Fourier-Motzkin on raw constraints (coeffs, const, rel)

def _const_ok(c, rel):
    return c < 0 if rel == "<" else (c <= 0 if rel == "<=" else c == 0)


def _simplify(cons):
    """Scale, drop trivial constraints, keep the tightest of parallel ones.

    Returns None when a constant constraint fails.
    """
    eqs = {}
    ineqs = {}
    for a, c, rel in cons:
        nz = next((i for i, x in enumerate(a) if x != 0), None)
        if nz is None:
            if not _const_ok(c, rel):
                return None
            continue
        s = a[nz] if rel == "=" else abs(a[nz])
        if s != 1:
            a = tuple(x / s for x in a)
            c = c / s
        if rel == "=":
            if a in eqs and eqs[a] != c:
                return None
            eqs[a] = c
        else:
            cur = ineqs.get(a)
            if cur is None or c > cur[0] or (c == cur[0] and rel == "<"):
                ineqs[a] = (c, rel)
    out = [(a, c, "=") for a, c in eqs.items()]
    out += [(a, c, r) for a, (c, r) in ineqs.items()]
    return out


def _subst_raw(con, j, expr_coeffs, expr_const):
    """Substitute x_j := expr into a raw constraint."""
    a, c, rel = con
    aj = a[j]
    if aj == 0:
        return con
    na = tuple((0 if i == j else x) + aj * e for i, (x, e) in enumerate(zip(a, expr_coeffs)))
    return (na, c + aj * expr_const, rel)


def _solve_eq(a, c, j):
    """The expression for x_j from a·x + c = 0."""
    aj = a[j]
    coeffs = tuple(Fraction(0) if i == j else -x / aj for i, x in enumerate(a))
    return coeffs, -c / aj


def find_point(cons, k):
    """A rational point satisfying all raw constraints, or None."""
    cons = _simplify(cons)
    if cons is None:
        return None
    for idx, (a, c, rel) in enumerate(cons):
        if rel != "=":
            continue
        j = next(i for i, x in enumerate(a) if x != 0)
        ec, ek = _solve_eq(a, c, j)
        rest = [_subst_raw(o, j, ec, ek) for t, o in enumerate(cons) if t != idx]
        sol = find_point(rest, k)
        if sol is None:
            return None
        sol = list(sol)
        sol[j] = sum((x * s for x, s in zip(ec, sol) if x), ek)
        return tuple(sol)
    active = [j for j in range(k) if any(a[j] != 0 for a, _, _ in cons)]
    if not active:
        return (Fraction(0),) * k

    def cost(j):
        p = sum(1 for a, _, _ in cons if a[j] > 0)
        n = sum(1 for a, _, _ in cons if a[j] < 0)
        return p * n - p - n

    j = min(active, key=cost)
    upper = [con for con in cons if con[0][j] > 0]
    lower = [con for con in cons if con[0][j] < 0]
    rest = [con for con in cons if con[0][j] == 0]
    for ua, uc, ur in upper:
        for la, lc, lr in lower:
            su, sl = ua[j], -la[j]
            na = tuple(x / su + y / sl for x, y in zip(ua, la))
            rel = "<" if "<" in (ur, lr) else "<="
            rest.append((na, uc / su + lc / sl, rel))
    sol = find_point(rest, k)
    if sol is None:
        return None
    sol = list(sol)
    sol[j] = Fraction(0)
    lo = hi = None
    for a, c, rel in upper + lower:
        s = sum((x * v for x, v in zip(a, sol) if x), c)
        b = -s / a[j]
        strict = rel == "<"
        if a[j] > 0:
            if hi is None or b < hi[0] or (b == hi[0] and strict):
                hi = (b, strict)
        else:
            if lo is None or b > lo[0] or (b == lo[0] and strict):
                lo = (b, strict)
    sol[j] = _pick(lo, hi)
    return tuple(sol)


def _pick(lo, hi):
    if lo is None and hi is None:
        return Fraction(0)
    if lo is None:
        return hi[0] - 1 if hi[1] else hi[0]
    if hi is None:
        return lo[0] + 1 if lo[1] else lo[0]
    if lo[0] == hi[0]:
        return lo[0]
    return (lo[0] + hi[0]) / 2


def _rank(rows):
    m = [list(r) for r in rows]
    rank = 0
    ncols = len(m[0]) if m else 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][col] != 0:
                f = m[i][col] / m[rank][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[rank])]
        rank += 1
    return rank


def _solve_square(rows, rhs):
    """Unique solution of rows·x = rhs, or None if singular."""
    n = len(rows)
    m = [list(r) + [b] for r, b in zip(rows, rhs)]
    for col in range(n):
        piv = next((i for i in range(col, n) if m[i][col] != 0), None)
        if piv is None:
            return None
        m[col], m[piv] = m[piv], m[col]
        for i in range(n):
            if i != col and m[i][col] != 0:
                f = m[i][col] / m[col][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[col])]
    return tuple(m[i][n] / m[i][i] for i in range(n))


def _nullvector(rows, k):
    """A nonzero vector in the kernel of ``rows`` (assumed rank k-1)."""
    m = [list(r) for r in rows]
    pivots = []
    rank = 0
    for col in range(k):
        piv = next((i for i in range(rank, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        pv = m[rank][col]
        m[rank] = [x / pv for x in m[rank]]
        for i in range(len(m)):
            if i != rank and m[i][col] != 0:
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[rank])]
        pivots.append(col)
        rank += 1
    free = next(c for c in range(k) if c not in pivots)
    v = [Fraction(0)] * k
    v[free] = Fraction(1)
    for r, col in enumerate(pivots):
        v[col] = -m[r][free]
    return tuple(v)


def primitive(v):
    den = 1
    for x in v:
        den = lcm(den, Fraction(x).denominator)
    ints = [int(Fraction(x) * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    return tuple(x // g for x in ints) if g else tuple(ints)


# ---------------------------------------------------------------------------
# cylindrical levels

@dataclass(frozen=True)
class Section:
    form: AffineForm

    multiplier = 1


@dataclass(frozen=True)
class Sector:
    lo: AffineForm | None = None
    hi: AffineForm | None = None

    @property
    def bounded(self):
        return self.lo is not None and self.hi is not None

    @property
    def multiplier(self):
        if self.lo is None and self.hi is None:
            return 1
        return -1 if self.bounded else 0


def _levels_constraints(levels, k):
    out = []
    for i, lv in enumerate(levels):
        x = AffineForm.coordinate(k, i)
        if isinstance(lv, Section):
            out.append(eq(x, lv.form))
        else:
            if lv.lo is not None:
                out.append(lt(lv.lo, x))
            if lv.hi is not None:
                out.append(lt(x, lv.hi))
    return tuple(out)


def _levels_sample(levels):
    pt = []
    for lv in levels:
        if isinstance(lv, Section):
            pt.append(lv.form(pt))
        else:
            lo = None if lv.lo is None else (lv.lo(pt), True)
            hi = None if lv.hi is None else (lv.hi(pt), True)
            pt.append(_pick(lo, hi))
    return tuple(pt)


def _cyl_decompose(cons, n, k):
    """Disjoint relatively open cylindrical cells covering the convex set ``cons``.

    ``cons`` only involves coordinates < n.  Returns a list of level tuples.
    """
    cons = _simplify(cons)
    if cons is None:
        return []
    if n == 0:
        return [()]
    j = n - 1
    involve = [c for c in cons if c[0][j] != 0]
    base = [c for c in cons if c[0][j] == 0]
    eqs = [c for c in involve if c[2] == "="]
    if eqs:
        a, c0, _ = eqs[0]
        ec, ek = _solve_eq(a, c0, j)
        root = AffineForm(ec, ek)
        sub = base + [_subst_raw(o, j, ec, ek) for o in involve if o is not eqs[0]]
        return [lv + (Section(root),) for lv in _cyl_decompose(sub, n - 1, k)]
    lowers, uppers = [], []
    for a, c, rel in involve:
        ec, ek = _solve_eq(a, c, j)
        (uppers if a[j] > 0 else lowers).append((AffineForm(ec, ek), rel == "<"))
    # strict bounds first so that ties resolve to the stronger bound
    lowers.sort(key=lambda t: not t[1])
    uppers.sort(key=lambda t: not t[1])
    out = []

    def region(choice, pool, is_lower):
        if choice is None:
            return []
        r = []
        f0 = pool[choice][0]
        for t, (f, _) in enumerate(pool):
            if t == choice:
                continue
            d = (f - f0) if is_lower else (f0 - f)
            r.append((d.coeffs, d.const, "<" if t < choice else "<="))
        return r

    for li in (range(len(lowers)) if lowers else [None]):
        for ui in (range(len(uppers)) if uppers else [None]):
            reg = base + region(li, lowers, True) + region(ui, uppers, False)
            lo = lowers[li] if li is not None else None
            hi = uppers[ui] if ui is not None else None
            if lo and hi:
                d = lo[0] - hi[0]
                for blv in _cyl_decompose(reg + [(d.coeffs, d.const, "<")], n - 1, k):
                    if not lo[1]:
                        out.append(blv + (Section(lo[0]),))
                    out.append(blv + (Sector(lo[0], hi[0]),))
                    if not hi[1]:
                        out.append(blv + (Section(hi[0]),))
                if not lo[1] and not hi[1]:
                    for blv in _cyl_decompose(reg + [(d.coeffs, d.const, "=")], n - 1, k):
                        out.append(blv + (Section(lo[0]),))
            else:
                for blv in _cyl_decompose(reg, n - 1, k):
                    if lo:
                        if not lo[1]:
                            out.append(blv + (Section(lo[0]),))
                        out.append(blv + (Sector(lo[0], None),))
                    elif hi:
                        out.append(blv + (Sector(None, hi[0]),))
                        if not hi[1]:
                            out.append(blv + (Section(hi[0]),))
                    else:
                        out.append(blv + (Sector(None, None),))
    return out


def _violations(con):
    """Raw constraints whose disjoint union is the complement of ``con``."""
    a, c, rel = con
    na = tuple(-x for x in a)
    if rel == "<":
        return [(na, -c, "<=")]
    if rel == "<=":
        return [(na, -c, "<")]
    return [(a, c, "<"), (na, -c, "<")]


def _difference(piece, other):
    out = []
    prefix = []
    for con in other:
        for v in _violations(con):
            cand = piece + prefix + [v]
            if _simplify(cand) is not None and find_point(cand, len(con[0])) is not None:
                out.append(cand)
        prefix.append(con)
    return out


# ---------------------------------------------------------------------------
# cells and sets

@dataclass(frozen=True)
class Cell:
    constraints: tuple
    ambient_dim: int
    levels: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        for con in self.constraints:
            if con.form.dim != self.ambient_dim:
                raise DimensionMismatch(
                    f"constraint in dimension {con.form.dim}, cell in {self.ambient_dim}")

    @classmethod
    def from_levels(cls, levels, k):
        return cls(_levels_constraints(levels, k), k, tuple(levels))

    @classmethod
    def universe(cls, k):
        return cls((), k)

    def raw(self):
        return [c.raw() for c in self.constraints]

    @cached_property
    def sample(self):
        if self.levels is not None:
            return _levels_sample(self.levels)
        return find_point(self.raw(), self.ambient_dim)

    def is_empty(self):
        return self.sample is None

    def contains(self, point):
        if len(point) != self.ambient_dim:
            raise DimensionMismatch("point has the wrong dimension")
        point = tuple(as_rat(x) for x in point)
        return all(c.holds(point) for c in self.constraints)

    @cached_property
    def dim(self):
        """Dimension of the affine hull; -1 when empty."""
        if self.is_empty():
            return -1
        if self.levels is not None:
            return sum(1 for lv in self.levels if isinstance(lv, Sector))
        raw = self.raw()
        rows = [c[0] for c in raw if c[2] == "="]
        for i, (a, c, rel) in enumerate(raw):
            if rel == "<=":
                test = raw[:i] + [(a, c, "<")] + raw[i + 1:]
                if find_point(test, self.ambient_dim) is None:
                    rows.append(a)
        return self.ambient_dim - (_rank(rows) if rows else 0)

    def intersect(self, other):
        if other.ambient_dim != self.ambient_dim:
            raise DimensionMismatch("cells in different dimensions")
        return Cell(self.constraints + other.constraints, self.ambient_dim)

    def with_constraints(self, extra):
        return Cell(self.constraints + tuple(extra), self.ambient_dim)

    # closure geometry
    def _closure_rows(self):
        return [(c.form.coeffs, c.form.const, c.rel == "=") for c in self.constraints]

    def vertices(self):
        """Vertices of the closure (sorted); empty if the closure has lines."""
        k = self.ambient_dim
        rows = self._closure_rows()
        if k == 0:
            return [()] if not self.is_empty() else []
        found = set()
        for sub in combinations(range(len(rows)), k):
            A = [rows[i][0] for i in sub]
            b = [-rows[i][1] for i in sub]
            x = _solve_square(A, b)
            if x is None:
                continue
            ok = True
            for a, c, is_eq in rows:
                v = sum((p * q for p, q in zip(a, x)), c)
                if (is_eq and v != 0) or v > 0:
                    ok = False
                    break
            if ok:
                found.add(x)
        return sorted(found)

    def lineality_dim(self):
        rows = [r[0] for r in self._closure_rows()]
        return self.ambient_dim - (_rank(rows) if rows else 0)

    def recession_rays(self):
        """Primitive integral extreme rays of the recession cone of the closure."""
        k = self.ambient_dim
        if self.lineality_dim() > 0:
            raise DivergentSum("recession cone contains a line")
        rows = self._closure_rows()
        found = set()
        for sub in combinations(range(len(rows)), k - 1):
            A = [rows[i][0] for i in sub]
            if k > 1 and _rank(A) != k - 1:
                continue
            d = _nullvector(A, k) if k > 1 else (Fraction(1),)
            for s in (1, -1):
                u = tuple(s * x for x in d)
                ok = True
                for a, _, is_eq in rows:
                    v = sum(p * q for p, q in zip(a, u))
                    if (is_eq and v != 0) or v > 0:
                        ok = False
                        break
                if ok:
                    found.add(primitive(u))
        return sorted(found)

    def is_bounded(self):
        if self.is_empty():
            return True
        if self.levels is not None:
            return all(lv.bounded for lv in self.levels if isinstance(lv, Sector))
        if self.lineality_dim() > 0:
            return False
        return not self.recession_rays()

    def __str__(self):
        if not self.constraints:
            return "true"
        return " & ".join(str(c) for c in self.constraints)


@dataclass(frozen=True)
class SemilinearSet:
    cells: tuple
    ambient_dim: int

    def __post_init__(self):
        object.__setattr__(self, "cells", tuple(self.cells))
        for c in self.cells:
            if c.ambient_dim != self.ambient_dim:
                raise DimensionMismatch("cell dimension differs from the set's")

    @classmethod
    def empty(cls, k):
        return cls((), k)

    @classmethod
    def universe(cls, k):
        return cls((Cell.universe(k),), k)

    @classmethod
    def from_constraints(cls, constraints, k):
        return cls((Cell(tuple(constraints), k),), k)

    @classmethod
    def point(cls, pt):
        k = len(pt)
        return cls.from_constraints(
            [eq(AffineForm.coordinate(k, i), AffineForm.constant(k, as_rat(v)))
             for i, v in enumerate(pt)], k)

    @classmethod
    def interval(cls, lo=None, hi=None, lo_closed=False, hi_closed=False):
        x = AffineForm.coordinate(1, 0)
        cons = []
        if lo is not None:
            cons.append((le if lo_closed else lt)(AffineForm.constant(1, as_rat(lo)), x))
        if hi is not None:
            cons.append((le if hi_closed else lt)(x, AffineForm.constant(1, as_rat(hi))))
        return cls.from_constraints(cons, 1)

    def contains(self, point):
        return any(c.contains(point) for c in self.cells)

    def is_empty(self):
        return all(c.is_empty() for c in self.cells)

    def union(self, other):
        _same_dim(self, other)
        return SemilinearSet(self.cells + other.cells, self.ambient_dim)

    def intersect(self, other):
        _same_dim(self, other)
        cells = [a.intersect(b) for a in self.cells for b in other.cells]
        return SemilinearSet(tuple(c for c in cells if not c.is_empty()), self.ambient_dim)

    def with_constraints(self, extra):
        cells = [c.with_constraints(extra) for c in self.cells]
        return SemilinearSet(tuple(c for c in cells if not c.is_empty()), self.ambient_dim)

    def product(self, other):
        k1, k2 = self.ambient_dim, other.ambient_dim
        k = k1 + k2
        cells = []
        for a in self.cells:
            for b in other.cells:
                cons = [LinConstraint(c.form.lift(k, 0), c.rel) for c in a.constraints]
                cons += [LinConstraint(c.form.lift(k, k1), c.rel) for c in b.constraints]
                cells.append(Cell(tuple(cons), k))
        return SemilinearSet(tuple(cells), k)

    def pairwise_disjoint(self):
        cells = [c for c in self.cells if not c.is_empty()]
        for a, b in combinations(cells, 2):
            if not a.intersect(b).is_empty():
                return False
        return True

    @cached_property
    def normalized_cells(self):
        k = self.ambient_dim
        pieces = []
        for cell in self.cells:
            if cell.is_empty():
                continue
            mine = [cell.raw()]
            for prev in pieces:
                nxt = []
                for piece in mine:
                    if find_point(piece + prev, k) is None:
                        nxt.append(piece)
                    else:
                        nxt.extend(_difference(piece, prev))
                mine = nxt
            pieces.extend(mine)
        out = []
        for piece in pieces:
            for levels in _cyl_decompose(piece, k, k):
                out.append(Cell.from_levels(levels, k))
        return tuple(out)

    def __str__(self):
        if not self.cells:
            return "empty"
        return " | ".join(f"({c})" for c in self.cells)


def _same_dim(a, b):
    if a.ambient_dim != b.ambient_dim:
        raise DimensionMismatch(f"sets in Q^{a.ambient_dim} and Q^{b.ambient_dim}")


# ---------------------------------------------------------------------------
# public operations

def normalize(S):
    return SemilinearSet(S.normalized_cells, S.ambient_dim)


def chi_g(S):
    return sum((-1) ** c.dim for c in S.normalized_cells)


def chi_b(S):
    total = 0
    for c in S.normalized_cells:
        m = 1
        for lv in c.levels:
            m *= lv.multiplier
        total += m
    return total


def is_doubly_bounded(S):
    return all(c.is_bounded() for c in S.normalized_cells)


def chi_interval(lo, hi, lo_closed, hi_closed, variant="g"):
    """Euler characteristic of a 1-dimensional interval without building a set.

    ``lo``/``hi`` may be None for infinite ends.  Agrees with ``chi_g``/``chi_b``
    on the corresponding set (checked in the tests).
    """
    if lo is not None and hi is not None:
        if lo > hi or (lo == hi and not (lo_closed and hi_closed)):
            return 0
        if lo == hi:
            return 1
    closed_ends = int(lo is not None and lo_closed) + int(hi is not None and hi_closed)
    if variant == "g":
        return -1 + closed_ends
    if lo is None and hi is None:
        return 1
    if lo is None or hi is None:
        return closed_ends
    return -1 + closed_ends


def apply_unimodular(S, M, shift=None):
    """Image of S under g -> M g + shift with M in GL_k(Z)."""
    k = S.ambient_dim
    M = [[as_rat(x) for x in row] for row in M]
    if len(M) != k or any(len(r) != k for r in M):
        raise DimensionMismatch("matrix size does not match the set")
    if any(x.denominator != 1 for r in M for x in r):
        raise NotUnimodular("matrix has non-integer entries")
    inv = _inverse(M)
    if inv is None or any(x.denominator != 1 for r in inv for x in r):
        raise NotUnimodular("matrix is not invertible over Z")
    shift = [as_rat(x) for x in (shift or [0] * k)]
    # g = inv (g' - shift)
    cells = []
    for cell in S.cells:
        cons = []
        for con in cell.constraints:
            a = con.form.coeffs
            na = tuple(sum(a[i] * inv[i][j] for i in range(k)) for j in range(k))
            nc = con.form.const - sum(na[j] * shift[j] for j in range(k))
            cons.append(LinConstraint(AffineForm(na, nc), con.rel))
        cells.append(Cell(tuple(cons), k))
    return SemilinearSet(tuple(cells), k)


def _inverse(M):
    n = len(M)
    aug = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(M)]
    for col in range(n):
        piv = next((i for i in range(col, n) if aug[i][col] != 0), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        pv = aug[col][col]
        aug[col] = [x / pv for x in aug[col]]
        for i in range(n):
            if i != col and aug[i][col] != 0:
                f = aug[i][col]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[col])]
    return [r[n:] for r in aug]


def jcb_gamma(u, v):
    return -sum(as_rat(x) for x in u) + sum(as_rat(x) for x in v)


# ---------------------------------------------------------------------------
# lattice points and lattice sums

def _enum_levels(levels, m, prefix=()):
    j = len(prefix)
    if j == len(levels):
        yield prefix
        return
    lv = levels[j]
    if isinstance(lv, Section):
        v = lv.form(prefix)
        if (v * m).denominator == 1:
            yield from _enum_levels(levels, m, prefix + (v,))
        return
    lo, hi = lv.lo(prefix), lv.hi(prefix)
    for t in range(floor(lo * m) + 1, ceil(hi * m)):
        yield from _enum_levels(levels, m, prefix + (Fraction(t, m),))


def _cell_lattice_points(cell, m):
    if not cell.is_bounded():
        raise InfiniteLattice("unbounded cell")
    return list(_enum_levels(cell.levels, m))


def _positive_functional(rays, k):
    """Integral linear functional strictly positive on every ray."""
    cons = [(tuple(-Fraction(x) for x in u), Fraction(1), "<=") for u in rays]
    phi = find_point(cons, k)
    if phi is None:
        raise DivergentSum("recession cone is not pointed")
    return AffineForm(primitive(phi) if any(phi) else phi, 0)


def lattice_points(S, m=1):
    """Sorted points of S ∩ (1/m Z)^k; raises InfiniteLattice if there are infinitely many."""
    if m < 1:
        raise ValueError("m must be a positive integer")
    pts = []
    for cell in S.normalized_cells:
        if cell.is_bounded():
            pts.extend(_enum_levels(cell.levels, m))
            continue
        rays = cell.recession_rays() if cell.lineality_dim() == 0 else None
        if rays is None:
            probe = _probe_line_cell(cell, m)
        else:
            phi = _positive_functional(rays, cell.ambient_dim)
            probe = _first_points(cell, m, phi, (), rays)
        if probe:
            raise InfiniteLattice(f"unbounded cell {cell} meets the lattice")
    return sorted(set(pts))


def _nullspace(rows, k):
    """Basis of {u : rows·u = 0} (rational vectors)."""
    m = [list(r) for r in rows]
    pivots = []
    rank = 0
    for col in range(k):
        piv = next((i for i in range(rank, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        pv = m[rank][col]
        m[rank] = [x / pv for x in m[rank]]
        for i in range(len(m)):
            if i != rank and m[i][col] != 0:
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[rank])]
        pivots.append(col)
        rank += 1
    basis = []
    for free in (c for c in range(k) if c not in pivots):
        v = [Fraction(0)] * k
        v[free] = Fraction(1)
        for r, col in enumerate(pivots):
            v[col] = -m[r][free]
        basis.append(tuple(v))
    return basis


def _probe_line_cell(cell, m):
    """Whether a cell whose closure contains lines meets (1/m Z)^k.

    Translating by integral vectors of the lineality space keeps us inside the
    cell, so it is enough to look inside a fundamental window for those
    translations; the window is read off an integral echelon basis.
    """
    k = cell.ambient_dim
    rows = [r[0] for r in cell._closure_rows()]
    basis = [list(primitive(v)) for v in _nullspace(rows, k)]
    # lattice (1/m Z)^k scaled: translations by vectors of (1/m) * integral basis
    ech = []
    for col in range(k):
        piv = next((b for b in basis if b[col] != 0), None)
        if piv is None:
            continue
        basis.remove(piv)
        if piv[col] < 0:
            piv = [-x for x in piv]
        basis = [[x * piv[col] - y * b[col] for x, y in zip(b, piv)] for b in basis]
        basis = [b for b in basis if any(b)]
        ech.append((col, piv[col]))
    window = []
    for col, p in ech:
        x = AffineForm.coordinate(k, col)
        window += [le(AffineForm.constant(k, 0), x),
                   lt(x, AffineForm.constant(k, Fraction(p, m)))]
    sub = SemilinearSet((cell.with_constraints(window),), k)
    try:
        return bool(lattice_points(sub, m))
    except InfiniteLattice:
        return True


def _gf_bounds(cell, m, weight, floors, rays):
    """Rays scaled so that all exponent forms are integral along them, and the cap
    on exponents a numerator term can reach."""
    k = cell.ambient_dim
    scaled = []
    for u in rays:
        q = 1
        for f in (weight,) + tuple(floors):
            q = lcm(q, f.linear()(u).denominator)
        scaled.append(tuple(q * x for x in u))
    total = weight + sum(floors, AffineForm.zero(k))
    slopes = []
    for u in scaled:
        s = total.linear()(u)
        if s <= 0:
            raise DivergentSum(f"exponent does not grow along direction {u}", direction=u)
        slopes.append(s)
    verts = cell.vertices()
    top = max(m * total(v) for v in verts) + sum(slopes)
    return scaled, top


def _exponent(pt, m, weight, floors):
    e = m * weight(pt)
    for f in floors:
        e += floor(m * f(pt))
    return e


def _first_points(cell, m, weight, floors, rays):
    """Lattice points of ``cell`` whose exponent is at most the numerator cap."""
    k = cell.ambient_dim
    _, top = _gf_bounds(cell, m, weight, floors, rays)
    total = weight + sum(floors, AffineForm.zero(k))
    # exponent <= m*total(pt), so cutting at total <= top/m keeps every point we need
    cut = SemilinearSet((cell.with_constraints([le(total * m, AffineForm.constant(k, top))]),), k)
    pts = []
    for c in cut.normalized_cells:
        pts.extend(_enum_levels(c.levels, m))
    return [p for p in pts if _exponent(p, m, weight, floors) <= top]


def cell_lattice_sum(cell, m, weight, floors=()):
    """sum over lattice points of T^{-e(pt)}, e = m*weight + sum floor(m*floor_form)."""
    from .tseries import TRational, truncate_product_desc
    if cell.is_bounded():
        num = {}
        for p in _enum_levels(cell.levels, m):
            e = -_exponent(p, m, weight, floors)
            num[e] = num.get(e, 0) + 1
        return TRational(num)
    if cell.lineality_dim() > 0:
        raise DivergentSum("cell contains a line")
    rays = cell.recession_rays()
    scaled, top = _gf_bounds(cell, m, weight, floors, rays)
    total_lin = (weight + sum(floors, AffineForm.zero(cell.ambient_dim))).linear()
    den = tuple((0, -total_lin(u)) for u in scaled)
    series = {}
    for p in _first_points(cell, m, weight, floors, rays):
        e = -_exponent(p, m, weight, floors)
        series[e] = series.get(e, 0) + 1
    return TRational(truncate_product_desc(series, den, -top), den)


def lattice_sum(S, sigma, m=1, floors=()):
    """Generating function sum_{γ ∈ S ∩ (1/m Z)^k} T^{-(mσ(γ) + Σ⌊mρ(γ)⌋)}."""
    from .tseries import TRational
    if sigma.dim != S.ambient_dim:
        raise DimensionMismatch("weight form and set live in different dimensions")
    total = TRational.zero()
    for cell in S.normalized_cells:
        total = total + cell_lattice_sum(cell, m, sigma, tuple(floors))
    return total


# ---------------------------------------------------------------------------
# region mini-language

_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|(g\d+)|(<=|>=|<|>|=)|([-+*()])|(&)|(\|))")


def _tokenize(text):
    pos = 0
    toks = []
    text = text.rstrip()
    while pos < len(text):
        mt = _TOKEN.match(text, pos)
        if not mt or mt.end() == pos:
            pos += len(text[pos:]) - len(text[pos:].lstrip())
            raise RegionSyntaxError(f"unexpected character {text[pos]!r}", pos)
        start = mt.start(mt.lastindex)
        kind = ("num", "var", "rel", "op", "and", "or")[mt.lastindex - 1]
        toks.append((kind, mt.group(mt.lastindex), start))
        pos = mt.end()
    return toks


class _Parser:
    def __init__(self, text, k):
        self.toks = _tokenize(text)
        self.i = 0
        self.k = k
        self.text = text

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None, len(self.text))

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def region(self):
        cells = [self.conj()]
        while self.peek()[0] == "or":
            self.take()
            cells.append(self.conj())
        if self.peek()[0] is not None:
            raise RegionSyntaxError(f"unexpected {self.peek()[1]!r}", self.peek()[2])
        return cells

    def conj(self):
        cons = self.chain()
        while self.peek()[0] == "and":
            self.take()
            cons += self.chain()
        return cons

    def chain(self):
        exprs = [self.expr()]
        rels = []
        while self.peek()[0] == "rel":
            rels.append(self.take()[1])
            exprs.append(self.expr())
        if not rels:
            raise RegionSyntaxError("expected a relation", self.peek()[2])
        out = []
        for (a, b), r in zip(zip(exprs, exprs[1:]), rels):
            if r == "<":
                out.append(lt(a, b))
            elif r == "<=":
                out.append(le(a, b))
            elif r == ">":
                out.append(lt(b, a))
            elif r == ">=":
                out.append(le(b, a))
            else:
                out.append(eq(a, b))
        return out

    def expr(self):
        sign = 1
        if self.peek()[1] in ("+", "-"):
            sign = -1 if self.take()[1] == "-" else 1
        acc = self.term() * sign
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            t = self.term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term(self):
        f = self.factor()
        while True:
            kind, val, _ = self.peek()
            if val == "*":
                self.take()
                g = self.factor()
            elif kind in ("num", "var") or val == "(":
                g = self.factor()
            else:
                return f
            if f.is_constant():
                f = g * f.const
            elif g.is_constant():
                f = f * g.const
            else:
                raise RegionSyntaxError("product of two variables is not linear", self.peek()[2])

    def factor(self):
        kind, val, pos = self.take()
        if kind == "num":
            return AffineForm.constant(self.k, Fraction(val))
        if kind == "var":
            idx = int(val[1:]) - 1
            if idx < 0 or idx >= self.k:
                raise RegionSyntaxError(f"variable {val} outside Q^{self.k}", pos)
            return AffineForm.coordinate(self.k, idx)
        if val == "(":
            e = self.expr()
            if self.take()[1] != ")":
                raise RegionSyntaxError("expected ')'", pos)
            return e
        if val == "-":
            return -self.factor()
        raise RegionSyntaxError(f"unexpected {val!r}" if val else "unexpected end of input", pos)


def _max_var(text):
    idx = [int(v) for v in re.findall(r"g(\d+)", text)]
    return max(idx) if idx else 0


def parse_region(text, k=None):
    """Parse ``"0 < g1 & g1 < 1 | g1 = 3"`` style text into a SemilinearSet.

    ``&`` binds tighter than ``|``; chained relations ``0 < g1 < 1`` are allowed.
    The ambient dimension defaults to the largest variable index used.
    """
    if not text or not text.strip():
        raise RegionSyntaxError("empty region", 0)
    k = _max_var(text) if k is None else k
    cells = _Parser(text, k).region()
    return SemilinearSet(tuple(Cell(tuple(c), k) for c in cells), k)
