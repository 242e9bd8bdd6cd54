from fractions import Fraction
from itertools import permutations, product
from math import factorial

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import hull_volume, is_vertex_lp, lattice_points_box, minkowski_points, mixed_volume_ie
from toricsolve.errors import DimensionMismatchError, NonGenericLiftingError
from toricsolve.polynomial import Support
from toricsolve.polytope import (
    Lifting,
    convex_hull,
    lattice_points,
    minkowski_sum,
    mixed_subdivision,
    mixed_volume,
    mv_deficient,
    newton_polytope,
    volume,
)
from toricsolve.solver import overconstrain
from toricsolve.sysfile import load_fixture


def dense(n, d):
    return [p for p in product(range(d + 1), repeat=n) if sum(p) <= d]


def support_strategy(n, max_points=5, max_coord=4):
    pt = st.tuples(*[st.integers(0, max_coord)] * n)
    return st.lists(pt, min_size=1, max_size=max_points, unique=True)


# --------------------------------------------------------------------------
# hulls


def test_unit_square_hull():
    q = newton_polytope([(0, 0), (1, 0), (0, 1), (1, 1)])
    assert set(q.vertices) == {(0, 0), (1, 0), (0, 1), (1, 1)}
    assert q.dimension == 2


def test_boundary_point_is_not_a_vertex():
    pts = [(0, 0), (2, 0), (0, 2), (1, 1)]
    q = newton_polytope(pts)
    expected = {p for p in pts if is_vertex_lp(p, [o for o in pts if o != p])}
    assert set(q.vertices) == expected == {(0, 0), (2, 0), (0, 2)}


def test_single_point_polytope():
    q = newton_polytope([(3, 1)])
    assert q.dimension == 0
    assert q.vertices == ((3, 1),)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 3).flatmap(lambda n: support_strategy(n, 8, 3)))
def test_hull_vertices_match_lp(points):
    q = convex_hull(points)
    expected = {p for p in points if is_vertex_lp(p, [o for o in points if o != p])}
    assert set(q.vertices) == expected


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 3).flatmap(lambda n: support_strategy(n, 8, 3)))
def test_volume_matches_qhull(points):
    assert float(volume(convex_hull(points))) == pytest.approx(hull_volume(points), abs=1e-9)


def test_minkowski_of_segments_is_square():
    a = newton_polytope([(0, 0), (1, 0)])
    b = newton_polytope([(0, 0), (0, 1)])
    assert set(minkowski_sum(a, b).vertices) == {(0, 0), (1, 0), (0, 1), (1, 1)}
    assert set(minkowski_sum(b, a).vertices) == set(minkowski_sum(a, b).vertices)


def test_minkowski_with_point_translates():
    q = newton_polytope([(0, 0), (2, 1), (1, 3)])
    s = minkowski_sum(q, newton_polytope([(5, -2)]))
    assert set(s.vertices) == {(5, -2), (7, -1), (6, 1)}


def test_minkowski_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        minkowski_sum(newton_polytope([(0, 0)]), newton_polytope([(0, 0, 0)]))


def test_minkowski_of_fixture_polytopes():
    sf = load_fixture("synthetic")
    supports = [list(f.exponents) for f in sf.polys]
    q = newton_polytope(supports[0])
    for s in supports[1:]:
        q = minkowski_sum(q, newton_polytope(s))
    pts = minkowski_points(supports)
    expected = {p for p in pts if is_vertex_lp(p, [o for o in pts if o != p])}
    assert set(q.vertices) == expected


@pytest.mark.parametrize("points, shift", [
    ([(0, 0), (1, 0), (0, 1), (1, 1)], (Fraction(1, 3), Fraction(1, 5))),
    ([(0, 0), (3, 1), (1, 2)], (Fraction(1, 7), Fraction(2, 9))),
])
def test_lattice_points_match_box_scan(points, shift):
    assert sorted(lattice_points(convex_hull(points), shift)) == sorted(lattice_points_box(points, shift))


def test_lattice_points_unit_square_shifted():
    pts = lattice_points(convex_hull([(0, 0), (1, 0), (0, 1), (1, 1)]), (Fraction(1, 3), Fraction(1, 5)))
    assert pts == [(1, 1)]


def test_lattice_points_segment():
    assert sorted(lattice_points(convex_hull([(0,), (2,)]), (Fraction(1, 2),))) == [(1,), (2,)]


# --------------------------------------------------------------------------
# subdivisions and mixed volume


def test_two_axis_segments_single_mixed_cell():
    sub = mixed_subdivision([Support(((0, 0), (1, 0))), Support(((0, 0), (0, 1)))])
    assert len(sub.cells) == 1
    assert sub.cells[0].is_mixed and sub.cells[0].volume == 1


def test_two_triangles():
    tri = Support(((0, 0), (1, 0), (0, 1)))
    sub = mixed_subdivision([tri, tri], seed=3)
    assert sub.total_volume() == 2
    assert sum(c.volume for c in sub.mixed_cells) == 1


def test_nongeneric_lifting_is_reported():
    tri = Support(((0, 0), (1, 0), (0, 1)))
    flat = Lifting(tuple({p: 0 for p in tri.points} for _ in range(2)), seed=-1)
    with pytest.raises(NonGenericLiftingError):
        mixed_subdivision([tri, tri], lift=flat)


def test_subdivision_volume_and_disjointness():
    sf = load_fixture("synthetic")
    supports = [f.support for f in sf.polys]
    sub = mixed_subdivision(supports, seed=1)
    q = newton_polytope(supports[0])
    for s in supports[1:]:
        q = minkowski_sum(q, newton_polytope(s))
    assert sub.total_volume() == volume(q)
    # interiors are disjoint: each cell's barycenter lies in exactly one cell
    for c in sub.cells:
        pts = [tuple(sum(Fraction(f[k][j]) for k in range(len(f))) / len(f) for j in range(3)) for f in c.summands]
        center = [sum(p[j] for p in pts) for j in range(3)]
        assert sum(1 for d in sub.cells if d.contains(center, strict=True)) == 1


def test_dump_lists_cells():
    sub = mixed_subdivision([Support(((0, 0), (1, 0))), Support(((0, 0), (0, 1)))])
    assert sub.dump() == "((0, 0) (1, 0)|(0, 0) (0, 1)) 1 mixed"


def test_fixture_mixed_volume():
    sf = load_fixture("synthetic")
    assert mixed_volume([f.support for f in sf.polys]) == 16


def test_unit_square_twice():
    sq = [(0, 0), (1, 0), (0, 1), (1, 1)]
    assert mixed_volume([sq, sq]) == 2


@pytest.mark.parametrize("degrees", [(2, 3), (1, 3), (2, 2), (3, 3), (1, 2, 3), (2, 2, 2)])
def test_bezout_for_dense_supports(degrees):
    n = len(degrees)
    supports = [dense(n, d) for d in degrees]
    expected = 1
    for d in degrees:
        expected *= d
    assert mixed_volume(supports) == expected == mixed_volume_ie(supports)


def test_lower_dimensional_family_gives_zero():
    seg = [(0, 0), (1, 1)]
    assert mixed_volume([seg, [(0, 0), (2, 2)]]) == 0


def test_mv_deficient_segments_1d():
    seg = [(0,), (3,)]
    mvs, total = mv_deficient([seg, seg])
    assert mvs == [3, 3] and total == 6


def test_mv_deficient_fixtures():
    sf = load_fixture("synthetic")
    oc = overconstrain(sf.polys, "u", u_coeffs=sf.u_coeffs)
    assert mv_deficient([f.support for f in oc.polys]) == ([16, 12, 12, 12], 52)
    oc = overconstrain(sf.polys, "hidden", hidden_index=2)
    assert mv_deficient([f.support for f in oc.polys]) == ([4, 4, 4], 12)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 3).flatmap(lambda n: st.lists(support_strategy(n), min_size=n, max_size=n)),
       st.integers(0, 50))
def test_mv_matches_inclusion_exclusion(supports, seed):
    assert mixed_volume(supports, seed=seed) == mixed_volume_ie(supports)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 3).flatmap(lambda n: st.lists(support_strategy(n), min_size=n, max_size=n)))
def test_mv_symmetry(supports):
    base = mixed_volume(supports)
    for perm in permutations(range(len(supports))):
        assert mixed_volume([supports[i] for i in perm]) == base


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 3).flatmap(lambda n: st.tuples(st.lists(support_strategy(n), min_size=n, max_size=n),
                                                     st.tuples(*[st.integers(-3, 3)] * n))))
def test_mv_translation_invariance(data):
    supports, shift = data
    moved = [[tuple(a + b for a, b in zip(p, shift)) for p in supports[0]]] + supports[1:]
    assert mixed_volume(moved) == mixed_volume(supports)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 3).flatmap(lambda n: support_strategy(n, 6)))
def test_mv_diagonal(points):
    n = len(points[0])
    assert mixed_volume([points] * n) == factorial(n) * volume(convex_hull(points))


@settings(max_examples=15, deadline=None)
@given(support_strategy(2, 4, 3), support_strategy(2, 4, 3), support_strategy(2, 4, 3),
       st.integers(0, 2), st.integers(0, 2))
def test_mv_multilinearity(a, b, c, mu, rho):
    def scaled(s, k):
        return [tuple(k * x for x in p) for p in s] if k else [(0, 0)]

    combined = minkowski_points([scaled(a, mu), scaled(b, rho)])
    lhs = mixed_volume([combined, c])
    rhs = mu * mixed_volume([a, c]) + rho * mixed_volume([b, c])
    assert lhs == rhs
