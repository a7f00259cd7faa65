"""Classes of definable sets over RV, presented as finite sums of blocks.

A block is the set of points whose Γ-coordinates lie in a polyhedral set P ⊂ Q^l,
whose residue data lies in a twistback class ``cls``, and which carries extra
VF-coordinates ranging over open discs of radius ρ_j(γ) around 0.  ``gm`` of the
Γ-coordinates have a free torus fibre; the residues of the others are absorbed
in ``cls``.  ``omega_f`` records the valuative volume form along the block.

For a block b and m >= 1 the measured lattice sum is

    h_m(b) = cls · Gm^gm · Σ_{γ ∈ P ∩ (1/m Z)^l} T^{-(m ω(γ) + Σ_j ⌊m ρ_j(γ)⌋)}

and the three retractions are
    e_b      = χ_b(P) · cls · Gm^gm
    e_g      = χ_g(P) · cls · Gm^gm · L^{-grade}
    e_diamond = e_b, defined only when P is doubly bounded.
"""
from __future__ import annotations

import logging
import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .errors import (DimensionMismatch, NonIntegralExponent, NotNormalized,
                     NotPolynomial, OverlappingPieces)
from .grothring import (SCHEMA_VERSION, VClass, lim_infinity,
                        symbol_from_json, vclass_from_json, vclass_to_json)
from .semilinear import (AffineForm, Cell, LinConstraint, SemilinearSet, as_rat,
                         cell_lattice_sum, chi_b, chi_g, is_doubly_bounded, lt)
from .tseries import TRational, truncate_product

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class DiscMarker:
    radius: AffineForm


@dataclass(frozen=True)
class Block:
    cls: VClass
    P: SemilinearSet
    omega_f: AffineForm
    discs: tuple = ()
    gm: int = 0

    def __post_init__(self):
        object.__setattr__(self, "discs", tuple(
            d if isinstance(d, DiscMarker) else DiscMarker(d) for d in self.discs))
        k = self.P.ambient_dim
        if self.omega_f.dim != k:
            raise DimensionMismatch("volume form and polyhedron dimensions differ")
        for d in self.discs:
            if d.radius.dim != k:
                raise DimensionMismatch("disc radius and polyhedron dimensions differ")
        if not 0 <= self.gm <= k:
            raise ValueError("gm must count a subset of the Γ-coordinates")

    @property
    def l(self):
        return self.P.ambient_dim

    @property
    def grade(self):
        return self.l + len(self.discs)

    def radii(self):
        return tuple(d.radius for d in self.discs)

    def weight(self):
        return self.cls * VClass.Gm(self.gm)

    def check_radii(self):
        """Every disc radius must be nonnegative on P."""
        zero = AffineForm.zero(self.l)
        for d in self.discs:
            if not self.P.with_constraints([lt(d.radius, zero)]).is_empty():
                raise ValueError("disc radius is negative somewhere on P")

    def product(self, other):
        k1, k = self.l, self.l + other.l
        return Block(self.cls * other.cls, self.P.product(other.P),
                     self.omega_f.lift(k, 0) + other.omega_f.lift(k, k1),
                     tuple(DiscMarker(d.radius.lift(k, 0)) for d in self.discs)
                     + tuple(DiscMarker(d.radius.lift(k, k1)) for d in other.discs),
                     self.gm + other.gm)


def _block_key(b):
    return repr((b.grade, sorted(b.cls.terms.items()), b.P, b.omega_f, b.discs, b.gm))


class RVClass:
    """Finite Z-combination of blocks; identical blocks are merged."""

    def __init__(self, terms=()):
        acc = {}
        for b, c in terms:
            if c:
                acc[b] = acc.get(b, 0) + int(c)
        items = [(b, c) for b, c in acc.items() if c]
        items.sort(key=lambda bc: _block_key(bc[0]))
        self.terms = tuple(items)

    @classmethod
    def of(cls, block, coeff=1):
        return cls(((block, coeff),))

    def blocks(self):
        return [b for b, _ in self.terms]

    def __add__(self, other):
        return RVClass(self.terms + other.terms)

    def __neg__(self):
        return RVClass(tuple((b, -c) for b, c in self.terms))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, RVClass):
            return RVClass(tuple((b1.product(b2), c1 * c2) for b1, c1 in self.terms
                                 for b2, c2 in other.terms))
        return RVClass(tuple((b, c * other) for b, c in self.terms))

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, RVClass) and self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def __len__(self):
        return len(self.terms)


# ---------------------------------------------------------------------------
# standard classes

def unit():
    """The grade-0 unit."""
    return RVClass.of(Block(VClass.one(), SemilinearSet.universe(0), AffineForm.zero(0)))


def one_class():
    """[1]: the point 1 ∈ RV, grade 1."""
    return RVClass.of(Block(VClass.one(), SemilinearSet.point((0,)), AffineForm.coordinate(1, 0)))


def t_point(gamma):
    """The class of the single point with valuative coordinate γ."""
    return RVClass.of(Block(VClass.one(), SemilinearSet.point((as_rat(gamma),)),
                            AffineForm.coordinate(1, 0)))


def rv_open_disc():
    """[RV°°]: the nonzero elements of the open unit disc modulo 1 + M."""
    return RVClass.of(Block(VClass.one(), SemilinearSet.interval(0, None),
                            AffineForm.coordinate(1, 0), (), 1))


def annulus(gamma):
    """Elements with 0 < vrv <= γ."""
    return RVClass.of(Block(VClass.one(), SemilinearSet.interval(0, as_rat(gamma), hi_closed=True),
                            AffineForm.coordinate(1, 0), (), 1))


def p_gamma(gamma):
    """annulus(γ) + t_γ - [1], grade 1.  The point t_γ needs γ ∈ Z."""
    gamma = as_rat(gamma)
    if gamma.denominator != 1 or gamma < 1:
        raise ValueError("p_gamma needs a positive integer")
    return annulus(gamma) + t_point(gamma) - one_class()


# ---------------------------------------------------------------------------
# retractions

def e_b(x):
    total = VClass.zero()
    for b, c in x.terms:
        total = total + b.weight() * (chi_b(b.P) * c)
    return total


def e_g(x):
    total = VClass.zero()
    for b, c in x.terms:
        total = total + b.weight() * VClass.L(-b.grade) * (chi_g(b.P) * c)
    return total


def e_diamond(x):
    total = VClass.zero()
    for b, c in x.terms:
        if not is_doubly_bounded(b.P):
            raise NotNormalized("block has an unbounded direction that is not fused into a disc")
        total = total + b.weight() * (chi_b(b.P) * c)
    return total


# ---------------------------------------------------------------------------
# lattice sums and zeta functions

def block_sum(b, m):
    """The T-series of a single block at level m, without its class weight."""
    total = TRational.zero()
    for cell in b.P.normalized_cells:
        total = total + cell_lattice_sum(cell, m, b.omega_f, b.radii())
    return total


def h_m(x, m):
    total = TRational.zero()
    for b, c in x.terms:
        total = total + block_sum(b, m) * (b.weight() * c)
    return total


def eta(F):
    """Substitute T = L; the denominators must divide exactly."""
    num = VClass.zero()
    for e, c in F.num.items():
        if e.denominator != 1:
            raise NonIntegralExponent(f"T^{e} has a fractional exponent")
        c = c if isinstance(c, VClass) else VClass.const(c)
        num = num + c.mul_lpow(int(e))
    for a, bexp in F.den:
        if bexp.denominator != 1:
            raise NonIntegralExponent(f"denominator exponent {bexp} is fractional")
        k = a + int(bexp)
        if k == 0:
            raise NotPolynomial("denominator vanishes at T = L")
        num = num.divide_by_binomial(k)
    return num


def coefficient(x, m):
    """[X_m] L^{-md}: the m-th zeta coefficient of x."""
    return eta(h_m(x, m))


def _convex_pieces(P):
    cells = [c for c in P.cells if not c.is_empty()]
    if P.pairwise_disjoint():
        return cells
    return list(P.normalized_cells)


def denominator(x):
    """Multiset of factors (a, b) meaning 1 - L^a T^b, one per vertex ray."""
    need = Counter()
    for b, _ in x.terms:
        for cell in _convex_pieces(b.P):
            here = Counter()
            for v in cell.vertices():
                q = 1
                for t in v:
                    q = lcm(q, t.denominator)
                vals = [b.omega_f(v)] + [rho(v) for rho in b.radii()]
                for t in vals:
                    q = lcm(q, t.denominator)
                E = q * vals[0] + sum(q * t for t in vals[1:])
                here[(-int(E), q)] += 1
            for key, n in here.items():
                need[key] = max(need[key], n)
    return tuple(sorted(need.elements()))


def zeta(x, extra=3):
    """Closed form of Σ_{m>=1} coefficient(x, m) T^m."""
    den = denominator(x)
    B = sum(bq for _, bq in den)
    top = max(B, 1)
    coeffs = [coefficient(x, m) for m in range(1, top + extra + 1)]
    series = {Fraction(m): c for m, c in enumerate(coeffs[:top], start=1) if not c.is_zero()}
    num = truncate_product(series, den, top)
    Z = TRational(num, den)
    check = Z.coefficients(top + extra)
    for m, (want, got) in enumerate(zip(coeffs, check), start=1):
        if want != got:
            raise AssertionError(f"closed form disagrees with coefficient {m}")
    if not Z.in_dagger():
        raise AssertionError("zeta function left the dagger family")
    return Z


def neg_lim_zeta(x):
    return -lim_infinity(zeta(x))


def fubini_volume(pieces, n):
    """Σ_i χ_b(E_i) · v_i · Gm^n for pairwise disjoint pieces E_i of a common base."""
    pieces = list(pieces)
    for i, (E, _) in enumerate(pieces):
        if E.ambient_dim != pieces[0][0].ambient_dim:
            raise DimensionMismatch("pieces live in different dimensions")
        for F, _ in pieces[i + 1:]:
            if not E.intersect(F).is_empty():
                raise OverlappingPieces("pieces of the base family overlap")
    total = VClass.zero()
    for E, v in pieces:
        total = total + v * chi_b(E)
    return total * VClass.Gm(n)


def refine(x, seed=0, cuts=1):
    """An equivalent presentation: random hyperplane cuts of each P and formal
    splits of the class coefficients."""
    rng = random.Random(seed)
    out = []
    for b, c in x.terms:
        pieces = [b]
        for _ in range(cuts):
            nxt = []
            for piece in pieces:
                nxt.extend(_cut(piece, rng))
            pieces = nxt
        for piece in pieces:
            out.extend(_split_cls(piece, c, rng))
    return RVClass(out)


def _cut(b, rng):
    k = b.l
    if k == 0 or b.P.is_empty():
        return [b]
    pt = next(c.sample for c in b.P.cells if not c.is_empty())
    coeffs = tuple(Fraction(rng.randint(-3, 3)) for _ in range(k))
    if not any(coeffs):
        coeffs = tuple(Fraction(int(i == 0)) for i in range(k))
    h = AffineForm(coeffs, 0)
    h = h - h(pt) - Fraction(rng.randint(-2, 2), rng.randint(1, 4))
    zero = AffineForm.zero(k)
    out = []
    for rel in (lt(h, zero), LinConstraint(h, "="), lt(zero, h)):
        P = b.P.with_constraints([rel])
        if not P.is_empty():
            out.append(Block(b.cls, P, b.omega_f, b.discs, b.gm))
    return out


def _split_cls(b, c, rng):
    terms = sorted(b.cls.terms.items())
    if len(terms) < 2:
        return [(b, c)]
    cut = rng.randint(1, len(terms) - 1)
    first = VClass(dict(terms[:cut]))
    rest = VClass(dict(terms[cut:]))
    return [(Block(first, b.P, b.omega_f, b.discs, b.gm), c),
            (Block(rest, b.P, b.omega_f, b.discs, b.gm), c)]


# ---------------------------------------------------------------------------
# serialization

def _form_json(f):
    return {"coeffs": [str(c) for c in f.coeffs], "const": str(f.const)}


def _form_from(obj):
    return AffineForm(tuple(Fraction(c) for c in obj["coeffs"]), Fraction(obj["const"]))


def set_to_json(S):
    return {"dim": S.ambient_dim,
            "cells": [[{**_form_json(con.form), "rel": con.rel} for con in cell.constraints]
                      for cell in S.cells]}


def set_from_json(obj):
    k = obj["dim"]
    cells = []
    for cons in obj["cells"]:
        cells.append(Cell(tuple(LinConstraint(_form_from(c), c["rel"]) for c in cons), k))
    return SemilinearSet(tuple(cells), k)


def rvclass_to_json(x):
    blocks = []
    syms = {}
    for b, c in x.terms:
        cj = vclass_to_json(b.cls, with_schema=False)
        syms.update(cj["symbols"])
        blocks.append({"coeff": c, "cls": cj["terms"], "P": set_to_json(b.P),
                       "omega_f": _form_json(b.omega_f),
                       "discs": [_form_json(d.radius) for d in b.discs], "gm": b.gm})
    return {"schema_version": SCHEMA_VERSION, "blocks": blocks, "symbols": syms}


def rvclass_from_json(obj):
    v = obj.get("schema_version", SCHEMA_VERSION)
    if v != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema_version {v}")
    for s in (obj.get("symbols") or {}).values():
        symbol_from_json(s)
    terms = []
    for bj in obj["blocks"]:
        cls = vclass_from_json({"terms": bj["cls"]})
        b = Block(cls, set_from_json(bj["P"]), _form_from(bj["omega_f"]),
                  tuple(DiscMarker(_form_from(d)) for d in bj.get("discs", [])), bj.get("gm", 0))
        terms.append((b, bj["coeff"]))
    return RVClass(terms)
