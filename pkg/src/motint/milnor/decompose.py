"""The Milnor fibre class as a combination of RV-blocks.

Each compact face τ of the Newton boundary contributes up to two strata over
the cone of weights Δ_τ ⊂ Q^{S(τ)}:

* transversal: w_τ(γ) = 1 and in_τ f(ac x) = 1;
* degenerate (faces with at least two points): 0 < w_τ(γ) < 1 and
  in_τ f(ac x) = 0, with the Jacobian shift 1 - w_τ in the volume form.

Coordinates outside S(τ) are fused into open discs whose radius keeps every
monomial off τ strictly above w_τ.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm

from ..errors import (Degenerate, DualPathMismatch, NondegeneracyUnknown,
                      UnsupportedGeometry)
from ..grothring import VClass, euler, neg_lim, register_symbol
from ..rvcalc import Block, DiscMarker, RVClass, e_diamond, zeta
from ..semilinear import AffineForm, LinConstraint, le, lt
from .newton import Nondegeneracy, is_nondegenerate, newton
from .poly import format_poly

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Stratum:
    face: object
    kind: str  # "transversal" or "degenerate"
    block: Block
    rest: tuple  # ambient indices of the disc coordinates, in disc order
    rhs: int

    def label(self, names):
        return f"{self.face.label(names)} {self.kind}"


def _torus_equation(face, rhs):
    eqn = [(tuple(p[i] for i in face.support), c) for p, c in face.initial.terms]
    if rhs:
        eqn.append(((0,) * len(face.support), -rhs))
    return eqn


def _symbol_name(face, rhs, latex=False):
    names = [face.initial.variables[i] for i in face.support]
    terms = [(tuple(p[i] for i in face.support), c) for p, c in face.initial.terms]
    body = format_poly(terms, names, latex=latex).replace(" ", "" if not latex else " ")
    if latex:
        return rf"\{{{body}={rhs}\}}"
    return f"{{{body}={rhs}}}"


def _action_order(P):
    q = 1
    for cell in P.cells:
        for v in cell.vertices():
            for t in v:
                q = lcm(q, t.denominator)
    return q


def _class_for(face, rhs, order, nondeg):
    l = len(face.support)
    pts = face.restricted_points()
    if rhs and len(pts) == 1 and order == 1:
        g = 0
        for x in pts[0]:
            g = gcd(g, x)
        if g == 1 and face.initial.terms[0][1] == 1:
            # {ξ^a = 1} with a primitive is a subtorus of codimension one
            return VClass.Gm(l - 1)
    sym = register_symbol(_symbol_name(face, rhs), l, [_torus_equation(face, rhs)],
                          order, nondeg, latex=_symbol_name(face, rhs, latex=True))
    return VClass.of(sym)


def _rest_radii(f, face, S, rest):
    """Candidate radius forms for each rest coordinate; the radius is their max."""
    k = len(S)
    w = face.weight
    cands = {}
    mixed = []
    for e in f.support():
        outside = [j for j in rest if e[j] > 0]
        if not outside:
            continue
        inner = AffineForm(tuple(Fraction(e[i]) for i in S), 0)
        if len(outside) == 1:
            j = outside[0]
            cands.setdefault(j, []).append((w - inner) / e[j])
        else:
            mixed.append((e, inner, outside))
    out = {}
    for j in rest:
        forms = [AffineForm.zero(k)]
        for c in cands.get(j, []):
            if c not in forms:
                forms.append(c)
        out[j] = forms
    return out, mixed


def _argmax_pieces(P, radii, rest):
    """Split P into regions on which each radius is a single affine form."""
    choices = [list(enumerate(radii[j])) for j in rest]
    for pick in itertools.product(*choices):
        extra = []
        for (i, form), j in zip(pick, rest):
            for t, other in enumerate(radii[j]):
                if t == i:
                    continue
                # ties go to the first index
                extra.append(lt(other, form) if t < i else le(other, form))
        piece = P.with_constraints(extra)
        if not piece.is_empty():
            yield piece, tuple(form for _, form in pick)


def _check_mixed(piece, w, mixed, rest, rho):
    pos = {j: t for t, j in enumerate(rest)}
    for e, inner, outside in mixed:
        bound = inner + sum((rho[pos[j]] * e[j] for j in outside), AffineForm.zero(inner.dim))
        if not piece.with_constraints([lt(bound, w)]).is_empty():
            raise UnsupportedGeometry(
                f"monomial {e} can reach the face weight inside a fused disc")


def strata(f, assume_nondegenerate=False, allow_nonconvenient=False):
    nd = newton(f, allow_nonconvenient)
    verdict = is_nondegenerate(f, nd)
    if verdict is Nondegeneracy.NO:
        raise Degenerate("f is degenerate with respect to its Newton boundary")
    if verdict is Nondegeneracy.UNKNOWN and not assume_nondegenerate:
        raise NondegeneracyUnknown(
            "nondegeneracy could not be decided; pass assume_nondegenerate to proceed")
    nondeg = True
    out = []
    for face in nd.faces:
        S = face.support
        k = len(S)
        rest = tuple(j for j in range(f.d) if j not in S)
        w = face.weight
        one = AffineForm.constant(k, 1)
        zero = AffineForm.zero(k)
        sigma = AffineForm.coordinate_sum(k)
        P0 = face.cone.with_constraints([LinConstraint(w - one, "=")])
        order = _action_order(P0)
        radii, mixed = _rest_radii(f, face, S, rest)
        kinds = [("transversal", 1, P0, sigma)]
        if len(face.points) >= 2:
            Pd = face.cone.with_constraints([lt(zero, w), lt(w, one)])
            kinds.append(("degenerate", 0, Pd, sigma + one - w))
        for kind, rhs, P, omega in kinds:
            cls = _class_for(face, rhs, order, nondeg)
            for piece, rho in _argmax_pieces(P, radii, rest):
                _check_mixed(piece, w, mixed, rest, rho)
                block = Block(cls, piece, omega, tuple(DiscMarker(r) for r in rho), 0)
                out.append(Stratum(face, kind, block, rest, rhs))
    return out


def decompose(f, assume_nondegenerate=False, allow_nonconvenient=False):
    """The class of X_f = {f = t} as an RVClass."""
    return RVClass(tuple((s.block, 1) for s in
                         strata(f, assume_nondegenerate, allow_nonconvenient)))


def zeta_f(f, **kw):
    return zeta(decompose(f, **kw))


@dataclass(frozen=True)
class MilnorResult:
    fiber: VClass
    via_zeta: VClass
    via_diamond: VClass
    zeta: object
    blocks: RVClass


def milnor_fiber(f, **kw):
    """S_f computed as -lim Z_f and as e_diamond of the decomposition; they must agree."""
    x = decompose(f, **kw)
    Z = zeta(x)
    a = neg_lim(Z)
    b = e_diamond(x)
    if a != b:
        raise DualPathMismatch(f"-lim Z_f = {a} but e_diamond = {b}")
    return MilnorResult(b, a, b, Z, x)


def euler_milnor(f, **kw):
    return euler(milnor_fiber(f, **kw).fiber)
