import json
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from motint.errors import BadPrime, NondegeneracyUnknown, PoleAtInfinity, TooLarge
from motint.grothring import (CoeffStream, VClass, euler, hadamard, lim_infinity, neg_lim,
                              newton_volume, point_count, rational_from_json, rational_to_json,
                              register_symbol, render, to_latex, vclass_from_json,
                              vclass_to_json)
from motint.tseries import TRational

L, Gm = VClass.L(), VClass.Gm()
C = register_symbol("C_test", 2, [[((2, 0), 1), ((0, 3), 1), ((0, 0), -1)]], 6, True)
Z = register_symbol("Z_test", 2, [[((2, 0), 1), ((0, 3), 1)]], 6, True)
MU3 = register_symbol("mu3_test", 1, [[((3,), 1), ((0,), -1)]], 3)


def test_ring_basics():
    assert L * L == VClass.L(2)
    assert Gm == L - 1
    x = VClass.of(C) * 3 + L
    assert (x - x).is_zero()
    assert L ** -2 == VClass.L(-2)


def test_symbol_registry_reuse_and_clash():
    again = register_symbol("C_test", 2, [[((2, 0), 1), ((0, 3), 1), ((0, 0), -1)]], 6, True)
    assert again is C
    other = register_symbol("C_test", 1, [[((1,), 1), ((0,), -1)]])
    assert other.name != "C_test"


def test_divide_by_binomial():
    x = (VClass.one() - VClass.L(3)) * VClass.of(C)
    assert x.divide_by_binomial(3) == VClass.of(C)


@pytest.mark.parametrize("a,b", [(0, 1), (-1, 1), (-5, 6), (3, 2), (-2, F(1, 2))])
def test_neg_lim_geometric(a, b):
    R = TRational({F(b): VClass.L(a)}, [(a, b)])
    assert neg_lim(R) == VClass.one()


def test_neg_lim_examples():
    c = VClass.of(C)
    assert neg_lim(TRational.const(c)) == -c
    assert neg_lim(TRational({F(2): VClass.L(-1)}, [(-5, 6)])).is_zero()
    assert neg_lim(TRational.zero()).is_zero()
    with pytest.raises(PoleAtInfinity):
        neg_lim(TRational({F(2): 1}, [(0, 1)]))
    xy = TRational({F(2): VClass.L(-1) - VClass.L(-2)}, [(-1, 1), (-1, 1)])
    assert neg_lim(xy) == VClass.one() - L


dagger = st.builds(
    lambda num, den: TRational({F(e): VClass.L(a) * c for e, a, c in num}, den),
    st.lists(st.tuples(st.integers(0, 4), st.integers(-3, 3), st.integers(-2, 2)), max_size=3),
    st.lists(st.tuples(st.integers(-4, 4), st.integers(1, 3)), min_size=1, max_size=2))


@settings(max_examples=40, deadline=None)
@given(dagger, dagger)
def test_lim_is_a_ring_homomorphism(R1, R2):
    try:
        a, b = lim_infinity(R1), lim_infinity(R2)
    except PoleAtInfinity:
        return
    assert lim_infinity(R1 + R2) == a + b
    assert lim_infinity(R1 * R2) == a * b
    assert lim_infinity(R1 * VClass.of(C)) == a * VClass.of(C)


def test_point_counts():
    assert point_count(Gm, 7) == 6
    assert point_count(VClass.of(MU3), 7) == 3
    brute = sum(1 for x in range(1, 7) for y in range(1, 7) if (x * x + y ** 3) % 7 == 1)
    assert point_count(VClass.of(C), 7) == brute == 6
    assert point_count(VClass.L(-2), 5) == F(1, 25)
    with pytest.raises(BadPrime):
        point_count(VClass.of(MU3), 5)
    with pytest.raises(TooLarge):
        point_count(VClass.of(C), 13, cap=100)


def test_euler():
    assert euler(Gm) == 0
    assert euler(VClass.of(C)) == -6
    assert euler(VClass.of(Z)) == 0
    assert euler(VClass.of(MU3)) == 3
    undecided = register_symbol("undecided_test", 2, [[((2, 0), 1), ((0, 2), 1), ((0, 0), -1)]])
    with pytest.raises(NondegeneracyUnknown):
        euler(VClass.of(undecided))
    assert newton_volume([(0, 0), (2, 0), (0, 3)], 2) == 3


vclasses = st.builds(
    lambda ts: sum(
        (VClass.L(k) * c * (VClass.of(C) if s else VClass.one()) for k, c, s in ts), VClass.zero()),
    st.lists(st.tuples(st.integers(-3, 3), st.integers(-3, 3), st.booleans()), max_size=4))


@settings(max_examples=40, deadline=None)
@given(vclasses, vclasses)
def test_specializations_are_homomorphisms(x, y):
    for p in (7, 13):
        assert point_count(x + y, p) == point_count(x, p) + point_count(y, p)
        assert point_count(x * y, p) == point_count(x, p) * point_count(y, p)
    assert euler(x * y) == euler(x) * euler(y)
    assert euler(x + y) == euler(x) + euler(y)


@settings(max_examples=40, deadline=None)
@given(vclasses)
def test_vclass_json_round_trip(x):
    blob = json.loads(json.dumps(vclass_to_json(x)))
    assert blob["schema_version"] == 1
    assert vclass_from_json(blob) == x


@settings(max_examples=30, deadline=None)
@given(dagger)
def test_rational_json_round_trip(R):
    blob = json.loads(json.dumps(rational_to_json(R)))
    assert rational_from_json(blob) == R


def test_json_shape():
    blob = vclass_to_json(L * 2 + VClass.of(C))
    assert {"coeff", "L_power", "symbols"} <= set(blob["terms"][0])


def test_render_and_latex():
    assert render(Gm) == "L - 1"
    assert render(VClass.zero()) == "0"
    assert r"\mathds{L}" in to_latex(L)


def test_tseries_expand_and_equality():
    R = TRational({F(1): 1}, [(0, 1)])
    assert R.coefficients(4) == [1, 1, 1, 1]
    same = TRational({F(1): 1, F(2): 1}, [(0, 1), (0, 1)]) - TRational({F(2): 2}, [(0, 1), (0, 1)])
    assert same == R
    assert R.in_dagger()
    neg = TRational({F(-1): 1}, [(0, -1)])
    assert neg.expand(-3) == {F(-1): 1, F(-2): 1, F(-3): 1}


def test_hadamard():
    v = VClass.of(C)
    A = CoeffStream.constant(v)
    one = CoeffStream.constant(1)
    assert hadamard(A, one).take(5) == A.take(5)
    cm = CoeffStream(lambda m: VClass.const(m))
    assert hadamard(A, cm).take(4) == [v * m for m in range(1, 5)]
    g1 = CoeffStream.periodic_geometric((1,), -1)
    g2 = CoeffStream.periodic_geometric((1,), -2)
    H = hadamard(g1, g2)
    assert H.take(10) == CoeffStream.periodic_geometric((1,), -3).take(10)
    assert H.closed_form().coefficients(10) == H.take(10)
