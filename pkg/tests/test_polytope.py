from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from toricrr.algebra import least_squares_exact
from toricrr.polytope import (
    DegeneratePolytope,
    LatticePolytope,
    PolytopeError,
    TooManyPoints,
    UnboundedPolytope,
    dilate,
    face_counts,
    faces,
    is_delzant,
    lattice_points,
    polytope_from_json,
    tangent_cone,
    vertices_of,
)

SQUARE = LatticePolytope.box((0, 0), (1, 1))
SIMPLEX = LatticePolytope.simplex(2)


def test_vertices():
    assert set(vertices_of(SQUARE)) == {(0, 0), (1, 0), (0, 1), (1, 1)}
    assert len(vertices_of(SIMPLEX)) == 3
    assert set(vertices_of(LatticePolytope.interval(-2, 0))) == {(-2,), (0,)}


def test_unbounded_and_degenerate_inputs():
    with pytest.raises(UnboundedPolytope, match="polytope unbounded"):
        vertices_of(LatticePolytope.from_halfspaces(2, [((-1, 0), 0), ((0, -1), 0)]))
    with pytest.raises(DegeneratePolytope):
        LatticePolytope.from_vertices([(0, 0), (1, 1), (2, 2)])


def test_delzant():
    assert is_delzant(SQUARE)[0]
    assert is_delzant(SIMPLEX)[0]
    ok, why = is_delzant(LatticePolytope.from_vertices([(0, 0), (2, 0), (0, 1)]))
    assert not ok
    assert "vertex (0,1)" in why and "2" in why


def test_dilate():
    assert set(dilate(SQUARE, 3).vertices) == {(0, 0), (3, 0), (0, 3), (3, 3)}
    assert set(dilate(LatticePolytope.interval(-2, 0), 2).vertices) == {(-4,), (0,)}
    assert dilate(SIMPLEX, 1) == SIMPLEX
    assert dilate(dilate(SIMPLEX, 2), 3) == dilate(SIMPLEX, 6)


def test_lattice_points():
    assert len(lattice_points(dilate(SQUARE, 3))) == 16
    for k in range(1, 6):
        assert len(lattice_points(dilate(SIMPLEX, k))) == (k + 1) * (k + 2) // 2
    empty = LatticePolytope.from_halfspaces(1, [((1,), -1), ((-1,), 0)])
    assert lattice_points(empty) == []
    pts = lattice_points(dilate(SQUARE, 2))
    assert pts == sorted(pts)


def test_lattice_point_cap():
    with pytest.raises(TooManyPoints):
        lattice_points(dilate(SQUARE, 100), cap=1000)


def test_tangent_cones():
    assert set(tangent_cone(SQUARE, (0, 0)).generators) == {(1, 0), (0, 1)}
    assert tangent_cone(LatticePolytope.interval(-2, 0), (-2,)).generators == ((1,),)
    assert set(tangent_cone(SIMPLEX, (1, 0)).generators) == {(-1, 0), (-1, 1)}
    with pytest.raises(PolytopeError):
        tangent_cone(SQUARE, (Fraction(1, 2), 0))


def test_faces_and_euler_relation():
    for p in (SQUARE, SIMPLEX, LatticePolytope.interval(0, 3)):
        counts = face_counts(p)
        assert sum((-1) ** d * c for d, c in counts.items()) == 1
    assert face_counts(SQUARE) == {0: 4, 1: 4, 2: 1}
    for f in faces(SQUARE):
        assert f.dim == 2 - len(f.active_constraints) or f.dim == 0


def test_json_round_trip_and_cross_validation():
    doc = SQUARE.to_json()
    assert polytope_from_json(doc) == SQUARE
    tri = polytope_from_json({"vertices": [[0, 0], [1, 0], [0, 1]]})
    assert set(tri.vertices) == set(SIMPLEX.vertices)
    with pytest.raises(PolytopeError):
        polytope_from_json({"dim": 2, "halfspaces": doc["halfspaces"], "vertices": [[0, 0], [2, 0], [0, 2], [2, 2]]})


def _ehrhart_check(p):
    g = p.dim
    ks = range(1, g + 3)
    rows = [[Fraction(k) ** e for e in range(g + 1)] for k in ks]
    counts = [len(lattice_points(dilate(p, k))) for k in ks]
    coeffs, resid = least_squares_exact(rows, counts)
    assert not any(resid)
    k = g + 3
    assert sum(c * k ** e for e, c in enumerate(coeffs)) == len(lattice_points(dilate(p, k)))


@given(st.lists(st.tuples(st.integers(-3, 3), st.integers(1, 3)), min_size=1, max_size=2))
@settings(max_examples=30, deadline=None)
def test_boxes_have_polynomial_counts(sides):
    lows = [a for a, _ in sides]
    highs = [a + w for a, w in sides]
    p = LatticePolytope.box(lows, highs)
    assert is_delzant(p)[0]
    _ehrhart_check(p)
    assert len(lattice_points(p)) == eval("*".join(str(w + 1) for _, w in sides))


def test_simplex_counts_are_polynomial():
    _ehrhart_check(SIMPLEX)
    _ehrhart_check(LatticePolytope.simplex(3))
