import json
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from motint.errors import NotNormalized, OverlappingPieces
from motint.grothring import VClass, register_symbol
from motint.rvcalc import (Block, DiscMarker, RVClass, annulus, coefficient, e_b, e_diamond,
                           e_g, eta, fubini_volume, h_m, neg_lim_zeta, one_class, p_gamma,
                           refine, rv_open_disc, rvclass_from_json, rvclass_to_json, t_point,
                           unit, zeta)
from motint.semilinear import AffineForm, SemilinearSet, lt, parse_region
from motint.tseries import TRational

L, Gm = VClass.L(), VClass.Gm()
SYM = register_symbol("V_rv_test", 1, [[((2,), 1), ((0,), -1)]], 2, True)


def test_retraction_constants():
    assert e_b(one_class()) == VClass.one()
    assert e_g(one_class()) == VClass.L(-1)
    assert e_b(rv_open_disc()).is_zero()
    assert e_g(rv_open_disc()) == -Gm * VClass.L(-1)
    rel = one_class() - rv_open_disc() - unit()
    assert e_b(rel).is_zero() and e_g(rel).is_zero()
    assert e_diamond(one_class()) == VClass.one()
    with pytest.raises(NotNormalized):
        e_diamond(rv_open_disc())


@pytest.mark.parametrize("g", [1, 2, 3])
def test_p_gamma_vanishes(g):
    x = p_gamma(g)
    assert e_diamond(x).is_zero()
    for m in range(1, 7):
        assert coefficient(x, m).is_zero()
        # the annulus plus point part, term by term
        series = h_m(annulus(g) + t_point(g), m).expand(-m * g - 5)
        want = {F(-i): Gm for i in range(1, m * g + 1)}
        want[F(-m * g)] = want[F(-m * g)] + 1
        assert {e: c for e, c in series.items()} == want
    with pytest.raises(ValueError):
        p_gamma(F(1, 2))


def test_h_m_examples():
    assert h_m(one_class(), 3) == TRational.const(VClass.one())
    assert h_m(rv_open_disc(), 1) == TRational({F(-1): Gm}, [(0, -1)])
    blk = Block(VClass.one(), SemilinearSet.point((0,)), AffineForm.zero(1),
                (DiscMarker(AffineForm.constant(1, F(1, 3))),))
    assert h_m(RVClass.of(blk), 2) == TRational.const(VClass.one())


def test_eta_examples():
    assert eta(TRational.monomial(1, -5)) == VClass.L(-5)
    assert eta(TRational({F(-1): Gm}, [(0, -1)])) == VClass.one()


def test_zeta_examples():
    Z = zeta(one_class())
    assert Z == TRational({F(1): 1}, [(0, 1)])
    assert neg_lim_zeta(one_class()) == VClass.one() == e_diamond(one_class())


def test_fubini_examples():
    v = VClass.of(SYM)
    assert fubini_volume([(SemilinearSet.universe(0), v)], 0) == v
    assert fubini_volume([(SemilinearSet.interval(0, None), v)], 1).is_zero()
    parts = [(SemilinearSet.interval(0, 1), v), (SemilinearSet.point((1,)), v)]
    assert fubini_volume(parts, 0).is_zero()
    with pytest.raises(OverlappingPieces):
        fubini_volume([(SemilinearSet.interval(0, 2), v), (SemilinearSet.interval(1, 3), v)], 0)


pos = st.builds(F, st.integers(1, 6), st.sampled_from([1, 2, 3]))
classes = st.sampled_from([VClass.one(), Gm, VClass.of(SYM), VClass.of(SYM) * 2 - L])


@st.composite
def small_block(draw):
    a = draw(pos)
    kind = draw(st.sampled_from(["point", "open", "half", "closed"]))
    if kind == "point":
        P = SemilinearSet.point((a,))
    else:
        b = a + draw(pos)
        P = SemilinearSet.interval(a, b, kind == "closed", kind != "open")
    omega = AffineForm.coordinate(1, 0) + draw(st.integers(0, 2))
    discs = tuple(DiscMarker(AffineForm.constant(1, draw(pos))) for _ in range(draw(st.integers(0, 1))))
    return Block(draw(classes), P, omega, discs, draw(st.integers(0, 1)))


rvclasses = st.builds(lambda bs, cs: RVClass(tuple(zip(bs, cs))),
                      st.lists(small_block(), min_size=1, max_size=3),
                      st.lists(st.integers(-2, 2), min_size=3, max_size=3))


@settings(max_examples=20, deadline=None)
@given(rvclasses, rvclasses)
def test_additive_and_multiplicative(x, y):
    for fn in (e_b, e_g, e_diamond):
        assert fn(x + y) == fn(x) + fn(y)
        assert fn(x * y) == fn(x) * fn(y)
    for m in (1, 2):
        assert h_m(x + y, m) == h_m(x, m) + h_m(y, m)
        assert h_m(x * y, m) == h_m(x, m) * h_m(y, m)
        assert coefficient(x * y, m) == coefficient(x, m) * coefficient(y, m)
    assert zeta(x + y) == zeta(x) + zeta(y)


@settings(max_examples=15, deadline=None)
@given(rvclasses, st.integers(0, 10 ** 6))
def test_refine_invariance(x, seed):
    y = refine(x, seed=seed, cuts=2)
    assert e_b(y) == e_b(x) and e_g(y) == e_g(x) and e_diamond(y) == e_diamond(x)
    for m in (1, 2, 3):
        assert h_m(y, m) == h_m(x, m)


def test_refine_zero():
    assert refine(RVClass()) == RVClass()


@settings(max_examples=15, deadline=None)
@given(rvclasses)
def test_dual_path_on_bounded_classes(x):
    assert neg_lim_zeta(x) == e_diamond(x)


@settings(max_examples=20, deadline=None)
@given(rvclasses)
def test_json_round_trip(x):
    blob = json.loads(json.dumps(rvclass_to_json(x)))
    assert blob["schema_version"] == 1
    assert rvclass_from_json(blob) == x


def _unfused(P, rho):
    """The disc {v(x) > ρ} written out as a free annular Γ-coordinate."""
    k = P.ambient_dim
    lifted = P.product(SemilinearSet.universe(1))
    extra = lt(rho.lift(k + 1), AffineForm.coordinate(k + 1, k))
    return lifted.with_constraints([extra])


@pytest.mark.parametrize("P,rho", [
    (SemilinearSet.point((F(1, 2),)), AffineForm.constant(1, F(1, 3))),
    (SemilinearSet.point((F(1, 3),)), AffineForm.constant(1, F(1, 2))),
    (parse_region("1/3 < g1 < 1"), AffineForm((F(1, 2),), 0)),
    (parse_region("0 < g1 <= 1"), AffineForm((F(-1, 3),), 1)),
])
def test_disc_fusion_soundness(P, rho):
    omega = AffineForm.coordinate(1, 0)
    fused = RVClass.of(Block(VClass.of(SYM), P, omega, (DiscMarker(rho),)))
    k = P.ambient_dim
    wide = _unfused(P, rho)
    unfused = RVClass.of(Block(VClass.of(SYM), wide,
                               omega.lift(k + 1) + AffineForm.coordinate(k + 1, k), (), 1))
    for m in range(1, 7):
        assert coefficient(fused, m) == coefficient(unfused, m)
    assert zeta(fused) == zeta(unfused)
