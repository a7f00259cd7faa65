"""Newton polyhedra, compact faces, initial forms and nondegeneracy."""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import gcd

import numpy as np

from ..errors import NotConvenient, Unsupported
from ..grothring import poly_deriv, poly_gcd
from ..semilinear import (AffineForm, LinConstraint, SemilinearSet, _rank, lt)
from .poly import Poly

log = logging.getLogger(__name__)

MAX_FACE_POINTS = 14


@dataclass(frozen=True)
class Face:
    """A compact face τ of Γ_+(f) with S(τ) the coordinates it involves.

    ``weight`` and ``cone`` live on Q^{|S|}, the coordinates listed in
    ``support``: the cone is the set of weights whose initial face is τ,
    and ``weight`` is the common value of ⟨γ, a⟩ for a ∈ τ.
    """
    points: tuple
    support: tuple
    weight: AffineForm
    cone: SemilinearSet
    initial: Poly

    @property
    def dim(self):
        if len(self.points) == 1:
            return 0
        base = self.points[0]
        rows = [[Fraction(a - b) for a, b in zip(p, base)] for p in self.points[1:]]
        return _rank(rows)

    def restricted_points(self):
        return [tuple(p[i] for i in self.support) for p in self.points]

    def label(self, names):
        pts = "-".join("(" + ",".join(str(x) for x in p) + ")" for p in self.points)
        kind = {0: "vertex", 1: "edge"}.get(self.dim, f"{self.dim}-face")
        return f"{kind} {pts}"


@dataclass(frozen=True)
class NewtonData:
    f: Poly
    faces: tuple
    convenient: bool
    missing_axes: tuple

    @property
    def vertices(self):
        return tuple(fc.points[0] for fc in self.faces if len(fc.points) == 1)

    def compact_faces(self, min_points=1):
        return [fc for fc in self.faces if len(fc.points) >= min_points]


def _subsets(n):
    for r in range(1, n + 1):
        for S in combinations(range(n), r):
            yield S


def missing_axes(f):
    out = []
    for i in range(f.d):
        if not any(e[i] > 0 and sum(e) == e[i] for e in f.support()):
            out.append(f.variables[i])
    return tuple(out)


def newton(f, allow_nonconvenient=False):
    miss = missing_axes(f)
    if miss and not allow_nonconvenient:
        raise NotConvenient(miss)
    faces = []
    for S in _subsets(f.d):
        Sset = set(S)
        supp = [e for e in f.support() if all(x == 0 or i in Sset for i, x in enumerate(e))]
        if not supp:
            continue
        if len(supp) > MAX_FACE_POINTS:
            raise Unsupported(f"{len(supp)} monomials on a coordinate subspace is beyond the face search")
        k = len(S)
        proj = [tuple(Fraction(e[i]) for i in S) for e in supp]
        positive = [lt(AffineForm.zero(k), AffineForm.coordinate(k, i)) for i in range(k)]
        forms = [AffineForm(p, 0) for p in proj]
        for r in range(1, len(supp) + 1):
            for F in combinations(range(len(supp)), r):
                used = {i for j in F for i, x in enumerate(supp[j]) if x}
                if used != Sset:
                    continue
                a0 = forms[F[0]]
                cons = list(positive)
                cons += [LinConstraint(forms[j] - a0, "=") for j in F[1:]]
                cons += [lt(a0, forms[j]) for j in range(len(supp)) if j not in F]
                cone = SemilinearSet.from_constraints(cons, k)
                if cone.is_empty():
                    continue
                pts = tuple(sorted(supp[j] for j in F))
                init = Poly(tuple((e, c) for e, c in f.terms if e in pts), f.variables)
                faces.append(Face(pts, S, a0, cone, init))
    return NewtonData(f, tuple(faces), not miss, miss)


# ---------------------------------------------------------------------------
# nondegeneracy

class Nondegeneracy(str, enum.Enum):
    YES = "Yes"
    NO = "No"
    UNKNOWN = "Unknown"


def _edge_poly(face):
    """For a 1-dimensional face, the univariate g with in_τ f = ξ^{a0} g(ξ^e)."""
    pts = face.points
    a, b = pts[0], pts[-1]
    diff = [y - x for x, y in zip(a, b)]
    g = 0
    for x in diff:
        g = gcd(g, x)
    e = [x // g for x in diff]
    # choose the endpoint with minimal projection on e
    a0 = min(pts, key=lambda p: sum(x * y for x, y in zip(p, e)))
    coeffs = {}
    fc = face.initial.as_dict()
    for p in pts:
        delta = [x - y for x, y in zip(p, a0)]
        i = next(j for j, x in enumerate(e) if x)
        t = delta[i] // e[i]
        coeffs[t] = coeffs.get(t, 0) + fc[p]
    return [Fraction(coeffs.get(t, 0)) for t in range(max(coeffs) + 1)]


def _edge_nondegenerate(face):
    g = _edge_poly(face)
    return len(poly_gcd(g, poly_deriv(g))) == 1


def _monomial_certificate(face):
    """Some variable occurs in exactly one monomial of in_τ f; then ∂_i in_τ f
    is a monomial and never vanishes on the torus."""
    for i in face.support:
        if sum(1 for p in face.points if p[i] > 0) == 1:
            return True
    return False


_MC_PRIMES = (31, 37, 41, 43, 47)


def _torus_witness(face, p, cap=2_000_000):
    """Search (F_p^×)^S for a singular point of {in_τ f = 0}."""
    S = face.support
    if (p - 1) ** len(S) > cap:
        return None
    fpoly = face.initial
    vals = np.arange(1, p, dtype=np.int64)
    grids = np.meshgrid(*([vals] * len(S)), indexing="ij")
    full = {i: g for i, g in zip(S, grids)}

    def ev(poly):
        tot = np.zeros(grids[0].shape, dtype=np.int64)
        for e, c in poly.terms:
            term = np.full(grids[0].shape, c % p, dtype=np.int64)
            for i, k in enumerate(e):
                for _ in range(k):
                    term = term * full[i] % p
            tot = (tot + term) % p
        return tot

    bad = ev(fpoly) == 0
    for i in S:
        bad &= ev(fpoly.derivative(i)) == 0
    return bool(bad.any())


def is_nondegenerate(f, nd=None):
    """Nondegeneracy with respect to the Newton boundary.

    Exact when every face has dimension at most 1 (in particular d <= 2):
    an edge is degenerate exactly when its univariate reduction has a repeated
    nonzero root.  Higher faces are certified by a variable appearing in a
    single monomial; otherwise a search for singular torus points over small
    prime fields returns No when it finds witnesses at most primes and Unknown
    otherwise.
    """
    nd = nd or newton(f, allow_nonconvenient=True)
    verdict = Nondegeneracy.YES
    for face in nd.compact_faces(min_points=2):
        dim = face.dim
        if dim == 1:
            if not _edge_nondegenerate(face):
                return Nondegeneracy.NO
            continue
        if _monomial_certificate(face):
            continue
        hits = [_torus_witness(face, p) for p in _MC_PRIMES]
        found = sum(1 for h in hits if h)
        log.debug("face %s: singular witnesses at %d primes", face.points, found)
        if found >= 3:
            return Nondegeneracy.NO
        verdict = Nondegeneracy.UNKNOWN
    return verdict
