from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import det_fraction
from toricsolve.errors import ZeroPolynomialError
from toricsolve.exact import cramer_int, det_int, lattice_combination, rank_frac, rank_int, solve_frac
from toricsolve.polynomial import support_of

int_matrix = st.integers(1, 5).flatmap(
    lambda n: st.lists(st.lists(st.integers(-9, 9), min_size=n, max_size=n), min_size=n, max_size=n))


@settings(max_examples=80, deadline=None)
@given(int_matrix)
def test_det_int_matches_fraction_elimination(a):
    assert det_int(a) == det_fraction(a)


@settings(max_examples=80, deadline=None)
@given(int_matrix)
def test_rank_int_matches_numpy(a):
    assert rank_int(a) == rank_frac(a) == np.linalg.matrix_rank(np.array(a, dtype=float))


@settings(max_examples=50, deadline=None)
@given(int_matrix, st.lists(st.integers(-9, 9), min_size=5, max_size=5))
def test_cramer(a, b):
    b = b[: len(a)]
    d, y = cramer_int(a, b)
    if det_int(a) == 0:
        assert d == 0
        return
    x = [Fraction(v, d) for v in y]
    assert [sum(r[j] * x[j] for j in range(len(a))) for r in a] == b
    assert solve_frac(a, b) == x


def test_lattice_combination_recovers_unit_vectors():
    vecs = [(2, 1), (1, 1), (5, 3)]
    k = lattice_combination(vecs, 2)
    for i, row in enumerate(k):
        e = [sum(c * v[j] for c, v in zip(row, vecs)) for j in range(2)]
        assert e == [1 if j == i else 0 for j in range(2)]


def test_lattice_combination_sublattice_fails():
    assert lattice_combination([(2, 0), (0, 2)], 2) is None


def test_support_of_drops_zero_coefficients():
    f = support_of({(0, 0): 1, (2, 0): 3, (1, 1): 0})
    assert f.exponents == ((0, 0), (2, 0))
    assert f.coeffs == (1, 3)


def test_support_of_merges_duplicates():
    f = support_of([((1, 0), 2), ((1, 0), 5), ((0, 0), Fraction(1, 2))])
    assert f.terms == {(0, 0): Fraction(1, 2), (1, 0): 7}


def test_cancellation_is_zero_polynomial():
    with pytest.raises(ZeroPolynomialError, match="zero polynomial"):
        support_of([((1, 0), 2), ((1, 0), -2)])


def test_x0_coefficients():
    f = support_of({(0,): (0, 1), (1,): 3, (2,): (1, 0, 2)})
    assert f.x0_degree == 2
    assert f([2.0], 3.0) == pytest.approx(3 + 3 * 2 + (1 + 2 * 9) * 4)


def test_gradient_matches_finite_differences():
    f = support_of({(0, 0): -9, (2, 0): -1, (0, 2): -1, (2, 2): 3, (1, 1): 8})
    x = np.array([0.7, -1.3])
    h = 1e-6
    fd = [(f(x + h * e) - f(x - h * e)) / (2 * h) for e in np.eye(2)]
    assert np.allclose(f.gradient(x), fd, atol=1e-6)
