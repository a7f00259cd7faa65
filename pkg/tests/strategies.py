"""Shared hypothesis strategies."""
from fractions import Fraction

from hypothesis import strategies as st

from motint.semilinear import AffineForm, Cell, LinConstraint, SemilinearSet

small_rat = st.builds(Fraction, st.integers(-6, 6), st.sampled_from([1, 2, 3]))
pos_rat = st.builds(Fraction, st.integers(1, 8), st.sampled_from([1, 2, 3, 4]))
RELS = ("<", "<=", "=")


@st.composite
def constraint(draw, k):
    coeffs = tuple(draw(st.integers(-2, 2)) for _ in range(k))
    if not any(coeffs):
        coeffs = tuple(int(i == 0) for i in range(k))
    rel = draw(st.sampled_from(RELS[:2] if draw(st.booleans()) else RELS))
    return LinConstraint(AffineForm(coeffs, draw(small_rat)), rel)


@st.composite
def box_cell(draw, k):
    cons = []
    for i in range(k):
        lo = draw(small_rat)
        hi = lo + draw(pos_rat)
        x = AffineForm.coordinate(k, i)
        cons.append(LinConstraint(AffineForm.constant(k, lo) - x, draw(st.sampled_from(RELS[:2]))))
        cons.append(LinConstraint(x - hi, draw(st.sampled_from(RELS[:2]))))
    cons += draw(st.lists(constraint(k), max_size=2))
    return Cell(tuple(cons), k)


@st.composite
def any_cell(draw, k):
    cons = draw(st.lists(constraint(k), min_size=0, max_size=3))
    return Cell(tuple(cons), k)


@st.composite
def bounded_set(draw, k=None):
    k = k or draw(st.integers(1, 2))
    cells = draw(st.lists(box_cell(k), min_size=1, max_size=3))
    return SemilinearSet(tuple(cells), k)


@st.composite
def any_set(draw, k=None):
    k = k or draw(st.integers(1, 2))
    cells = draw(st.lists(any_cell(k), min_size=1, max_size=2))
    return SemilinearSet(tuple(cells), k)


@st.composite
def unimodular(draw, k):
    M = [[int(i == j) for j in range(k)] for i in range(k)]
    for _ in range(draw(st.integers(0, 4))):
        op = draw(st.sampled_from(("add", "swap", "neg")))
        i = draw(st.integers(0, k - 1))
        j = draw(st.integers(0, k - 1))
        if op == "add" and i != j:
            c = draw(st.integers(-2, 2))
            M[i] = [a + c * b for a, b in zip(M[i], M[j])]
        elif op == "swap":
            M[i], M[j] = M[j], M[i]
        elif op == "neg":
            M[i] = [-a for a in M[i]]
    return M
