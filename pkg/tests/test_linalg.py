from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from strata import linalg
from strata.gaussian import ZERO, ONE, GaussianRational

small = st.integers(min_value=-4, max_value=4)


def g_matrix(rows, cols):
    return st.lists(
        st.lists(st.builds(GaussianRational, small, small), min_size=cols, max_size=cols),
        min_size=rows,
        max_size=rows,
    )


def test_rref_known():
    rows = [
        [ONE, ONE, ZERO],
        [ZERO, ONE, ZERO],
    ]
    reduced, pivots = linalg.rref(rows)
    assert pivots == [0, 1]
    assert reduced == [[ONE, ZERO, ZERO], [ZERO, ONE, ZERO]]


@given(g_matrix(3, 4))
@settings(max_examples=60)
def test_rref_canonical_under_row_shuffle(rows):
    reduced, pivots = linalg.rref(rows)
    again, pivots2 = linalg.rref(list(reversed(rows)))
    assert reduced == again and pivots == pivots2


@given(g_matrix(3, 4))
@settings(max_examples=60)
def test_nullspace_annihilates(rows):
    for v in linalg.nullspace(rows, 4):
        for row in rows:
            assert sum((a * b for a, b in zip(row, v)), start=ZERO) == ZERO
    reduced, _ = linalg.rref(rows)
    assert len(reduced) + len(linalg.nullspace(rows, 4)) == 4


@given(g_matrix(3, 3), st.lists(st.builds(GaussianRational, small, small), min_size=3, max_size=3))
@settings(max_examples=60)
def test_solve_linear_consistency(rows, x):
    rhs = linalg.matvec(rows, x)
    solution = linalg.solve_linear(rows, rhs)
    assert solution is not None
    assert linalg.matvec(rows, solution) == rhs


def test_solve_linear_infeasible():
    rows = [[ONE, ZERO], [ONE, ZERO]]
    assert linalg.solve_linear(rows, [ZERO, ONE]) is None


def test_invert_roundtrip():
    rows = [
        [GaussianRational(2), GaussianRational(1)],
        [GaussianRational(1), GaussianRational(1)],
    ]
    inv = linalg.invert(rows)
    assert inv is not None
    prod = [linalg.matvec(rows, [inv[r][c] for r in range(2)]) for c in range(2)]
    assert prod[0] == [ONE, ZERO] and prod[1] == [ZERO, ONE]
    assert linalg.invert([[ONE, ONE], [ONE, ONE]]) is None


def test_bareiss_det():
    assert linalg.bareiss_det([[2, 3], [1, 4]]) == 5
    assert linalg.bareiss_det([[1, 2, 3], [4, 5, 6], [7, 8, 9]]) == 0
    assert linalg.bareiss_det([[0, 1], [1, 0]]) == -1


def test_lattice_saturation():
    assert linalg.lattice_is_saturated([[2, -3]])
    assert linalg.lattice_is_saturated([[1, 1, -2]])
    assert not linalg.lattice_is_saturated([[2, 0]])
    assert not linalg.lattice_is_saturated([[2, 0], [0, 3]])
    assert linalg.lattice_is_saturated([[1, 0], [0, 1]])
    assert not linalg.lattice_is_saturated([[2, 2], [0, 4]])
    assert linalg.lattice_is_saturated([])


def test_clear_denominators():
    assert linalg.clear_denominators([Fraction(1), Fraction(-2, 3)]) == [3, -2]
    assert linalg.clear_denominators([Fraction(2), Fraction(4)]) == [1, 2]
    assert linalg.clear_denominators([Fraction(1, 2), Fraction(1, 3)]) == [3, 2]
