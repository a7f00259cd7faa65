"""Random Puiseux points and the exhaustiveness/disjointness check on strata.

Points x(t) are finite sums c t^e with rational exponents and coefficients in
F_q, so f(x(t)) is computed exactly.  A point lies on X_f when the leading
term of f(x(t)) is t.  Membership in a block only reads the point's
valuations, angular components and, for the fused coordinates, the
valuations compared with the disc radii.
"""
from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..errors import MembershipViolation
from ..semilinear import LinConstraint
from .decompose import strata
from .newton import newton

log = logging.getLogger(__name__)

Q = 10009  # q - 1 = 2^3 * 3^2 * 139


def _mul(a, b):
    out = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = e1 + e2
            out[e] = (out.get(e, 0) + c1 * c2) % Q
    return {e: c for e, c in out.items() if c}


def _add(a, b, sign=1):
    out = dict(a)
    for e, c in b.items():
        out[e] = (out.get(e, 0) + sign * c) % Q
    return {e: c for e, c in out.items() if c}


def evaluate(f, x):
    """f(x(t)) as an exact Puiseux polynomial over F_q."""
    total = {}
    powers = {}
    for e, c in f.terms:
        term = {Fraction(0): c % Q}
        for i, k in enumerate(e):
            if not k:
                continue
            key = (i, k)
            if key not in powers:
                p = {Fraction(0): 1}
                for _ in range(k):
                    p = _mul(p, x[i])
                powers[key] = p
            term = _mul(term, powers[key])
        total = _add(total, term)
    return total


def leading(s):
    if not s:
        return None, 0
    e = min(s)
    return e, s[e]


def is_member(f, x):
    e, c = leading(evaluate(f, x))
    return e == 1 and c == 1


def _eval_initial(poly, ac):
    tot = 0
    for e, c in poly.terms:
        v = c
        for i, k in enumerate(e):
            if k:
                v = v * pow(ac[i], k, Q)
        tot += v
    return tot % Q


def matches(st, gam, ac):
    """Does the point with valuations ``gam`` (None for 0) lie in the stratum?"""
    S = st.face.support
    if any(gam[i] is None for i in S):
        return False
    gS = tuple(gam[i] for i in S)
    if not st.block.P.contains(gS):
        return False
    for j, disc in zip(st.rest, st.block.discs):
        if gam[j] is not None and not gam[j] > disc.radius(gS):
            return False
    return (_eval_initial(st.face.initial, ac) - st.rhs) % Q == 0


@dataclass
class MembershipReport:
    trials: int
    members: int = 0
    nonmembers: int = 0
    consistent: int = 0
    targeted: int = 0
    hits: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def to_json(self):
        return {"trials": self.trials, "members": self.members, "nonmembers": self.nonmembers,
                "consistent": self.consistent, "targeted": self.targeted,
                "hits": dict(self.hits), "violations": self.violations}


def _rand_exp(rng, lo=Fraction(0)):
    return lo + Fraction(rng.randint(1, 12), rng.choice((1, 2, 3, 4, 6)))


def _tail(rng, e0):
    s = {}
    for _ in range(rng.randint(0, 2)):
        s[e0 + Fraction(rng.randint(1, 6), rng.choice((1, 2, 3, 6)))] = rng.randrange(1, Q)
    return s


def _generic_point(f, rng):
    x = []
    for _ in range(f.d):
        if rng.random() < 0.15:
            x.append({})
            continue
        e = Fraction(rng.randint(1, 8), rng.choice((1, 2, 3, 4, 6)))
        s = {e: rng.randrange(1, Q) if rng.random() < 0.7 else 1}
        s.update(_tail(rng, e))
        x.append(s)
    return x


_ROOT_GRID = np.arange(1, Q, dtype=np.int64)


def _roots(coeffs):
    """Nonzero roots in F_q of Σ coeffs[k] u^k (dict k -> c)."""
    val = np.zeros_like(_ROOT_GRID)
    for k, c in coeffs.items():
        val = (val + (c % Q) * _powvec(k)) % Q
    return _ROOT_GRID[val == 0]


_POW_CACHE = {}


def _powvec(k):
    if k not in _POW_CACHE:
        out = np.ones_like(_ROOT_GRID)
        for _ in range(k):
            out = out * _ROOT_GRID % Q
        _POW_CACHE[k] = out
    return _POW_CACHE[k]


def _face_weight(face, rng):
    """A random relative-interior point of Δ_τ ∩ {w_τ = 1}."""
    k = len(face.support)
    P0 = face.cone.with_constraints([LinConstraint(face.weight - 1, "=")])
    cell = next(c for c in P0.cells if not c.is_empty())
    verts = cell.vertices() if cell.is_bounded() else []
    if not verts:
        return tuple(cell.sample)
    lam = [Fraction(rng.randint(1, 6)) for _ in verts]
    tot = sum(lam)
    return tuple(sum(l * v[i] for l, v in zip(lam, verts)) / tot for i in range(k))


def _targeted_point(f, rng, faces, max_newton=200):
    d = f.d
    target = rng.choice(faces)
    gam = {i: g for i, g in zip(target.support, _face_weight(target, rng))}
    for j in range(d):
        if j not in gam and rng.random() < 0.6:
            gam[j] = Fraction(rng.randint(1, 18), rng.choice((1, 2, 3, 6)))
    finite = sorted(gam)
    supp = [e for e in f.support() if all(e[i] == 0 or i in gam for i in range(d))]
    vals = [sum(gam[i] * e[i] for i in finite) for e in supp]
    w0 = min(vals)
    face = [e for e, v in zip(supp, vals) if v == w0]
    degenerate = len(face) >= 2 and rng.random() < 0.5
    scale = Fraction(rng.randint(1, 9), 10) if degenerate else Fraction(1)
    gam = {i: g * scale / w0 for i, g in gam.items()}
    rhs = 0 if degenerate else 1
    S = sorted({i for e in face for i in range(d) if e[i]})
    coeff = dict(f.terms)
    for _ in range(20):
        ac = {i: rng.randrange(1, Q) for i in finite}
        j = rng.choice(S)
        uni = {}
        for e in face:
            c = coeff[e]
            for i in S:
                if i != j and e[i]:
                    c = c * pow(ac[i], e[i], Q)
            uni[e[j]] = (uni.get(e[j], 0) + c) % Q
        uni[0] = (uni.get(0, 0) - rhs) % Q
        roots = _roots(uni)
        if len(roots) == 0:
            continue
        ac[j] = int(rng.choice(list(roots)))
        deriv = sum(k * c * pow(ac[j], k - 1, Q) for k, c in uni.items() if k) % Q
        if degenerate and deriv == 0:
            continue
        break
    else:
        return None
    x = []
    for i in range(d):
        if i not in finite:
            x.append({})
            continue
        s = {gam[i]: ac[i]}
        s.update(_tail(rng, gam[i]))
        x.append(s)
    if not degenerate:
        return x
    dj = f.derivative(j)
    for _ in range(max_newton):
        F = _add(evaluate(f, x), {Fraction(1): 1}, sign=-1)
        e0, c0 = leading(F)
        if e0 is None or e0 > 1:
            return x
        vD, cD = leading(evaluate(dj, x))
        if vD is None:
            return None
        step = e0 - vD
        if step <= gam[j]:
            return None
        x[j] = _add(x[j], {step: (-c0 * pow(cD, Q - 2, Q)) % Q})
    return None


def _describe(x, names):
    parts = []
    for n, s in zip(names, x):
        body = " + ".join(f"{c}*t^{e}" for e, c in sorted(s.items())) or "0"
        parts.append(f"{n} = {body}")
    return "; ".join(parts)


def sample_membership(f, trials=500, seed=0, strict=True, **kw):
    """Check that members of X_f fall in exactly one stratum and non-members in
    no transversal one (a degenerate stratum only fixes the residues, leaving
    v(f) above the face weight)."""
    rng = random.Random(seed)
    sts = strata(f, **kw)
    faces = list(newton(f, allow_nonconvenient=True).faces)
    labels = [f"{s.label(f.variables)}#{n}" for n, s in enumerate(sts)]
    rep = MembershipReport(trials, hits={lab: 0 for lab in labels})
    for _ in range(trials):
        x = None
        if rng.random() < 0.5:
            x = _targeted_point(f, rng, faces)
            if x is not None:
                rep.targeted += 1
        if x is None:
            x = _generic_point(f, rng)
        gam = [min(s) if s else None for s in x]
        ac = [s[min(s)] if s else 0 for s in x]
        member = is_member(f, x)
        hit = [n for n, st in enumerate(sts) if matches(st, gam, ac)]
        for n in hit:
            rep.hits[labels[n]] += 1
        if member:
            rep.members += 1
            bad = len(hit) != 1
        else:
            rep.nonmembers += 1
            bad = any(sts[n].rhs == 1 for n in hit)
            if not bad and hit:
                e0, _ = leading(evaluate(f, x))
                w = sts[hit[0]].face.weight(tuple(gam[i] for i in sts[hit[0]].face.support))
                bad = e0 is not None and e0 <= w
        if bad:
            info = {"point": _describe(x, f.variables), "member": member,
                    "blocks": [labels[n] for n in hit]}
            rep.violations.append(info)
            if strict:
                raise MembershipViolation(
                    f"{'member' if member else 'non-member'} in {len(hit)} blocks", info["point"])
        else:
            rep.consistent += 1
    return rep
