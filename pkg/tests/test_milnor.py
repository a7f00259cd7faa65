from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from motint.errors import (BadPrime, ConstantTerm, Degenerate, NotConvenient,
                           NondegeneracyUnknown, PolySyntaxError, TooLarge)
from motint.grothring import VClass, euler, neg_lim
from motint.milnor import (Nondegeneracy, action_lcm, arc_count_oracle, choose_primes,
                           decompose, euler_milnor, is_member, is_nondegenerate, milnor_fiber,
                           newton, parse_poly, sample_membership, strata, verify, zeta_f)
from motint.rvcalc import e_b, e_diamond, e_g, zeta
from motint.semilinear import AffineForm
from motint.tseries import TRational

NC = {"allow_nonconvenient": True}
L = VClass.L()


def test_parse_poly():
    assert parse_poly("x^2 + y^3").as_dict() == {(2, 0): 1, (0, 3): 1}
    assert parse_poly("x*y").as_dict() == {(1, 1): 1}
    assert parse_poly("xy").as_dict() == {(1, 1): 1}
    assert parse_poly("3x^2 - 2*x*y^2 + x^2").as_dict() == {(2, 0): 4, (1, 2): -2}
    assert parse_poly("y + x").variables == ("x", "y")
    assert parse_poly("x10 + x2^2 + x1").variables == ("x1", "x2", "x10")
    with pytest.raises(ConstantTerm):
        parse_poly("x + 1")
    with pytest.raises(PolySyntaxError):
        parse_poly("x^")
    with pytest.raises(PolySyntaxError):
        parse_poly("x - x")


def test_newton():
    nd = newton(parse_poly("x^2 + y^3"))
    assert sorted(nd.vertices) == [(0, 3), (2, 0)]
    assert len(nd.compact_faces(2)) == 1
    assert newton(parse_poly("x")).vertices == ((1,),)
    with pytest.raises(NotConvenient) as err:
        newton(parse_poly("x*y"))
    assert "x" in str(err.value) and "y" in str(err.value)
    nd = newton(parse_poly("x*y"), allow_nonconvenient=True)
    (face,) = nd.faces
    assert face.weight == AffineForm((1, 1), 0)


def test_nondegeneracy():
    assert is_nondegenerate(parse_poly("x^2 + y^3")) is Nondegeneracy.YES
    assert is_nondegenerate(parse_poly("x^2 + 2*x*y + y^2")) is Nondegeneracy.NO
    assert is_nondegenerate(parse_poly("x^2 + y^2 + z^2")) is Nondegeneracy.YES
    assert is_nondegenerate(parse_poly("x^3 + y^3 + z^3 + x*y*z")) is Nondegeneracy.UNKNOWN
    with pytest.raises(Degenerate):
        decompose(parse_poly("x^2 + 2*x*y + y^2"))
    with pytest.raises(NondegeneracyUnknown):
        decompose(parse_poly("x^3 + y^3 + z^3 + x*y*z"))


def test_decompose_examples():
    (b,) = decompose(parse_poly("x")).blocks()
    assert b.cls == VClass.one() and b.P.contains((1,)) and b.omega_f((1,)) == 1
    (b,) = decompose(parse_poly("x*y"), **NC).blocks()
    assert b.cls == VClass.Gm() and b.P.contains((F(1, 3), F(2, 3)))
    sts = strata(parse_poly("x^2 + y^3"))
    assert len(sts) == 4
    kinds = sorted((len(s.face.points), s.kind) for s in sts)
    assert kinds == [(1, "transversal"), (1, "transversal"), (2, "degenerate"), (2, "transversal")]
    edge = next(s for s in sts if s.kind == "transversal" and len(s.face.points) == 2)
    assert edge.block.omega_f((F(1, 2), F(1, 3))) == F(5, 6)
    vx = next(s for s in sts if s.face.points == ((2, 0),))
    assert vx.block.discs[0].radius((F(1, 2),)) == F(1, 3)


def test_zeta_examples():
    T = lambda num, den: TRational(num, den)  # noqa: E731
    assert zeta_f(parse_poly("x")) == T({F(1): VClass.L(-1)}, [(-1, 1)])
    want = T({F(2): (L - 1) * VClass.L(-2)}, [(-1, 1), (-1, 1)])
    assert zeta_f(parse_poly("x*y"), **NC) == want


def test_milnor_examples():
    assert milnor_fiber(parse_poly("x")).fiber == VClass.one()
    assert milnor_fiber(parse_poly("x*y"), **NC).fiber == VClass.one() - L
    S = milnor_fiber(parse_poly("x^2 + y^3")).fiber
    assert len(S.terms) == 4 and euler(S) == -1


@pytest.mark.parametrize("text,chi", [
    ("x", 1), ("x^2 + y^2", 0), ("x^2 + y^3", -1), ("x^3 + y^3", -3), ("x^2 + y^5", -3),
    ("x^2 + y^2 + z^2", 2), ("x^3 + x*y^2 + y^4", -3), ("x^2 + y^3 + z^4", 7)])
def test_euler_milnor(text, chi):
    assert euler_milnor(parse_poly(text)) == chi


def test_euler_milnor_node():
    assert euler_milnor(parse_poly("x*y"), **NC) == 0


@pytest.mark.parametrize("text", ["x", "x^2 + y^3", "x^2 + y^2 + z^2", "x^3 + x*y^2 + y^4"])
def test_invariants(text):
    f = parse_poly(text)
    x = decompose(f)
    assert e_g(x) == e_b(x) * VClass.L(-f.d)
    for b in x.blocks():
        assert all(b.grade == f.d for b in x.blocks())
        lo = min(b.omega_f(v) for c in b.P.cells for v in c.vertices())
        assert lo > 0
    assert zeta(x).in_dagger()
    assert neg_lim(zeta(x)) == e_diamond(x)


def test_oracle_examples():
    for m in range(1, 5):
        assert arc_count_oracle(parse_poly("x"), 7, m) == F(1, 7 ** m)
    assert arc_count_oracle(parse_poly("x*y"), 5, 2) == F(4, 25)
    assert arc_count_oracle(parse_poly("x^2 + y^3"), 7, 2) == F(2, 7)
    with pytest.raises(TooLarge):
        arc_count_oracle(parse_poly("x^2 + y^3"), 13, 4, cap=10 ** 6)
    with pytest.raises(BadPrime):
        arc_count_oracle(parse_poly("x"), 9, 1)


def test_oracle_workers_deterministic():
    f = parse_poly("x^2 + y^3")
    assert arc_count_oracle(f, 7, 3, workers=2) == arc_count_oracle(f, 7, 3)


@pytest.mark.parametrize("text,p,m,kw", [
    ("x", 7, 4, {}), ("x*y", 5, 3, NC), ("x^2 + y^3", 7, 3, {}), ("x^2 + y^3", 13, 3, {})])
def test_verify_examples(text, p, m, kw):
    rows = verify(parse_poly(text), p, m, **kw)
    assert len(rows) == m and all(r.match for r in rows)


def test_verify_rejects_bad_prime():
    with pytest.raises(BadPrime):
        verify(parse_poly("x^2 + y^3"), 5, 1)


def test_prime_choice():
    x = decompose(parse_poly("x^2 + y^5"))
    assert action_lcm(x) == 10
    assert choose_primes(10, (7, 13), 2, 3) == [11]
    assert choose_primes(6, (7, 13)) == [7, 13]


def test_membership_examples():
    assert sample_membership(parse_poly("x"), 100, seed=1).consistent == 100
    assert sample_membership(parse_poly("x*y"), 200, seed=2, **NC).ok
    rep = sample_membership(parse_poly("x^2 + y^3"), 300, seed=3)
    assert rep.consistent == 300 and all(n > 0 for n in rep.hits.values())


def test_is_member():
    f = parse_poly("x^2 + y^3")
    assert is_member(f, [{F(1, 2): 1}, {}])
    assert is_member(f, [{F(1, 2): 1}, {F(1): 5}])
    assert not is_member(f, [{F(1, 2): 2}, {}])


@settings(max_examples=8, deadline=None)
@given(st.integers(2, 4), st.integers(2, 5))
def test_brieskorn_pipeline_matches_oracle(a, b):
    f = parse_poly(f"x^{a} + y^{b}")
    x = decompose(f)
    (p,) = choose_primes(action_lcm(x), (), 2, 2)
    assert all(r.match for r in verify(f, p, 2, x=x))
    assert euler_milnor(f) == 1 - (a - 1) * (b - 1)
