from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from motint.errors import (DimensionMismatch, DivergentSum, InfiniteLattice, NotUnimodular,
                           RegionSyntaxError)
from motint.semilinear import (AffineForm, SemilinearSet, apply_unimodular, chi_b, chi_g,
                               chi_interval, describe_set, is_doubly_bounded, jcb_gamma,
                               lattice_points, lattice_sum, normalize, parse_region)
from motint.tseries import TRational

from strategies import any_set, bounded_set, small_rat, unimodular

ray = SemilinearSet.interval(0, None)


def test_ray_characteristics():
    assert chi_g(ray) == -1
    assert chi_b(ray) == 0


@pytest.mark.parametrize("text,g,b", [
    ("g1 = 0", 1, 1),
    ("0 < g1 & g1 < 1 & 0 < g2 & g2 < 1", 1, 1),
    ("0 <= g1 & g1 <= 1", 1, 1),
    ("0 < g1 & g1 <= 2", 0, 0),
    ("g1 = 1/2 & g2 > 1/3", -1, 0),
    ("g1 < 0 & g1 > 1", 0, 0),
])
def test_region_examples(text, g, b):
    S = parse_region(text)
    assert (chi_g(S), chi_b(S)) == (g, b)


def test_whole_line():
    S = SemilinearSet.universe(1)
    assert chi_g(S) == -1
    assert chi_b(S) == 1


def test_parse_region_grammar():
    S = parse_region("0 < g1 < 1 | g1 = 3")
    assert S.contains((F(1, 2),)) and S.contains((3,)) and not S.contains((2,))
    S = parse_region("g1 + 2g2 >= 1 & g2 < 1/2", 2)
    assert S.contains((1, 0)) and not S.contains((0, 0))
    assert parse_region("g1 < 0 & g1 > 1").is_empty()
    with pytest.raises(RegionSyntaxError) as err:
        parse_region("g1 < $")
    assert err.value.position == 5


def test_parse_region_variable_outside_dimension():
    with pytest.raises(RegionSyntaxError):
        parse_region("g2 < 1", 1)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        SemilinearSet.interval(0, 1).intersect(SemilinearSet.universe(2))


def test_normalize_examples():
    closed = SemilinearSet.interval(0, 1, True, True)
    assert len(normalize(closed).cells) == 3
    quad = parse_region("g1 >= 0 & g2 >= 0")
    assert len(normalize(quad).cells) == 4
    assert len(normalize(normalize(closed)).cells) == 3


def test_doubly_bounded():
    assert is_doubly_bounded(SemilinearSet.interval(0, 1))
    assert not is_doubly_bounded(ray)
    assert is_doubly_bounded(SemilinearSet.empty(2))


def test_unimodular_examples():
    sq = parse_region("0 < g1 < 1 & 0 < g2 < 1")
    img = apply_unimodular(sq, [[1, 0], [1, 1]])
    assert chi_g(img) == 1
    assert img.contains((F(1, 2), F(1))) and not img.contains((F(1, 2), F(1, 4)))
    pt = apply_unimodular(SemilinearSet.point((0,)), [[1]], [F(1, 2)])
    assert pt.contains((F(1, 2),)) and not pt.contains((0,))
    with pytest.raises(NotUnimodular):
        apply_unimodular(sq, [[2, 0], [0, 1]])


def test_jcb_gamma():
    assert jcb_gamma([1, 2], [1, 2]) == 0
    assert jcb_gamma([F(1, 2)], [F(1, 3)]) == F(-1, 6)
    assert jcb_gamma([1, 2], [3]) == 0


def test_lattice_points_examples():
    assert lattice_points(SemilinearSet.interval(0, 1), 3) == [(F(1, 3),), (F(2, 3),)]
    seg = parse_region("3*g2 = 2*g1 & 0 < 6*g1 + 0*g2 & 6*g1 < 3", 2)
    assert lattice_points(seg, 6) == []
    with pytest.raises(InfiniteLattice):
        lattice_points(ray, 1)


def test_lattice_sum_examples():
    x = AffineForm.coordinate(1, 0)
    assert lattice_sum(SemilinearSet.point((F(1, 2),)), x, 2) == TRational.monomial(1, -1)
    geo = TRational({F(-1): 1}, [(0, -1)])
    assert lattice_sum(ray, x, 1) == geo
    assert lattice_sum(SemilinearSet.interval(F(1, 3), None), x, 2) == geo
    with pytest.raises(DivergentSum):
        lattice_sum(SemilinearSet.interval(None, 0), x, 1)


def test_half_open_and_closed():
    assert chi_b(SemilinearSet.interval(0, 5, hi_closed=True)) == 0
    assert chi_b(SemilinearSet.interval(0, 5, True, True)) == 1
    assert chi_interval(0, None, False, False, "b") == 0
    assert chi_interval(0, None, False, False, "g") == -1


def test_describe_set():
    S = parse_region("0 < g1 & g1 < 1 & g1 < 2")
    assert describe_set(S) == "g1 > 0 & g1 < 1"


@settings(max_examples=60, deadline=None)
@given(bounded_set())
def test_chi_agree_on_bounded(S):
    assert is_doubly_bounded(S)
    assert chi_g(S) == chi_b(S)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_unimodular_invariance(data):
    S = data.draw(any_set())
    M = data.draw(unimodular(S.ambient_dim))
    shift = data.draw(st.lists(small_rat, min_size=S.ambient_dim, max_size=S.ambient_dim))
    T = apply_unimodular(S, M, shift)
    assert chi_g(T) == chi_g(S)
    assert chi_b(T) == chi_b(S)


@settings(max_examples=40, deadline=None)
@given(any_set(), st.lists(st.tuples(small_rat, small_rat), min_size=5, max_size=5))
def test_normalize_idempotent_and_faithful(S, pts):
    N = normalize(S)
    assert N.pairwise_disjoint()
    assert len(normalize(N).cells) == len(N.cells)
    for pt in pts:
        pt = pt[:S.ambient_dim]
        assert N.contains(pt) == S.contains(pt)


@settings(max_examples=40, deadline=None)
@given(any_set(1), any_set(1))
def test_additive_and_multiplicative(A, B):
    for chi in (chi_g, chi_b):
        union = A.union(B)
        assert chi(union) == chi(A) + chi(B) - chi(A.intersect(B))
        assert chi(A.product(B)) == chi(A) * chi(B)


@settings(max_examples=25, deadline=None)
@given(st.data())
def test_lattice_sum_matches_enumeration(data):
    k = data.draw(st.integers(1, 2))
    m = data.draw(st.integers(1, 3))
    # positive orthant pieces so that the coordinate sum has positive slope
    lo = [data.draw(st.builds(F, st.integers(0, 4), st.sampled_from([1, 2, 3]))) for _ in range(k)]
    text = " & ".join(f"g{i + 1} > {lo[i]}" for i in range(k))
    S = parse_region(text, k)
    sigma = AffineForm.coordinate_sum(k)
    K = 12
    series = lattice_sum(S, sigma, m).expand(-K)
    box = S.with_constraints([
        __import__("motint.semilinear", fromlist=["le"]).le(sigma, AffineForm.constant(k, F(K, m)))])
    want = {}
    for pt in lattice_points(box, m):
        e = -m * sigma(pt)
        want[e] = want.get(e, 0) + 1
    assert {e: c for e, c in series.items() if e >= -K} == want
