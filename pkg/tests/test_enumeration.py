from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gapcover.errors import BudgetError, DimensionError
from gapcover.enumeration import (
    Gap,
    PointSet,
    enum_body,
    enum_gap,
    project_count,
    subset_check,
)
from gapcover.exactalg import Mat
from gapcover.geomcore import ConvexBody, Ellipsoid

from _oracles import brute_disk_points


def disk(radius_sq, dim=2):
    form = [[Fraction(int(i == j), radius_sq) for j in range(dim)] for i in range(dim)]
    return ConvexBody.from_ellipsoid(Ellipsoid(Mat(form)))


class TestEnumBody:
    def test_disk_radius_two(self):
        pts = enum_body(disk(4))
        assert len(pts) == 13
        assert pts.points == tuple(brute_disk_points(4, 2))

    def test_square_halfwidth_one(self):
        pts = enum_body(ConvexBody.box([1, 1]))
        assert len(pts) == 9

    def test_segment(self):
        pts = enum_body(ConvexBody.box([3]))
        assert pts.points == tuple((t,) for t in range(-3, 4))

    def test_vertex_hull_cross_polytope(self):
        pts = enum_body(ConvexBody.vertices([(2, 0), (0, 2)]))
        # |x| + |y| <= 2
        assert len(pts) == 13

    def test_vertex_hull_matches_per_point_lp(self):
        body = ConvexBody.vertices([(2, 1), (1, 2)])
        pts = enum_body(body)
        bounds = body.int_box_bounds()
        expected = [
            (x, y)
            for x in range(-bounds[0], bounds[0] + 1)
            for y in range(-bounds[1], bounds[1] + 1)
            if body.contains((x, y))
        ]
        assert pts.points == tuple(sorted(expected))

    def test_vertex_hull_1d(self):
        pts = enum_body(ConvexBody.vertices([(3,)]))
        assert pts.points == tuple((t,) for t in range(-3, 4))

    def test_budget(self):
        with pytest.raises(BudgetError):
            enum_body(ConvexBody.box([100, 100, 100]), cap=1000)

    def test_monotone(self):
        small = enum_body(disk(4))
        large = enum_body(disk(9))
        assert set(small.points) <= set(large.points)

    @given(st.integers(1, 40))
    @settings(max_examples=15, deadline=None)
    def test_symmetry(self, r_sq):
        pts = enum_body(disk(r_sq))
        for p in pts:
            assert tuple(-c for c in p) in pts


class TestEnumGap:
    def test_grid(self):
        g = Gap(2, (0, 0), ((1, 0), (0, 1)), (1, 1))
        pts = enum_gap(g)
        assert len(pts) == 9
        assert g.listed_cardinality() == 9

    def test_sheared_proper(self):
        g = Gap(2, (0, 0), ((1, 0), (1, 2)), (1, 1))
        pts = enum_gap(g)
        assert len(pts) == 9
        assert g.diffs_independent()

    def test_1d_stride(self):
        g = Gap(1, (0,), ((2,),), (3,))
        pts = enum_gap(g)
        assert pts.points == tuple((t,) for t in range(-6, 7, 2))

    def test_improper_dedup(self):
        g = Gap(1, (0,), ((1,), (1,)), (1, 1))
        pts = enum_gap(g)
        assert len(pts) == 5 < g.listed_cardinality()
        assert not g.diffs_independent()

    def test_budget(self):
        g = Gap(1, (0,), ((1,),), (10**8,))
        with pytest.raises(BudgetError):
            enum_gap(g)

    def test_order_zero(self):
        g = Gap(2, (1, 1), (), ())
        pts = enum_gap(g)
        assert pts.points == ((1, 1),)
        assert g.listed_cardinality() == 1

    @given(
        st.tuples(st.integers(0, 2), st.integers(0, 2)),
        st.tuples(st.integers(-3, 3), st.integers(-3, 3)),
        st.tuples(st.integers(-3, 3), st.integers(-3, 3)),
    )
    @settings(max_examples=30, deadline=None)
    def test_cardinality_iff_independent(self, halfsides, d1, d2):
        g = Gap(2, (0, 0), (d1, d2), halfsides)
        pts = enum_gap(g)
        if g.diffs_independent():
            assert len(pts) == g.listed_cardinality()


class TestSubsetCheck:
    def test_disk_in_box(self):
        pts = enum_body(disk(4))
        ok, witness = subset_check(pts, lambda p: abs(p[0]) <= 2 and abs(p[1]) <= 2)
        assert ok and witness is None

    def test_grid_not_in_disk(self):
        grid = enum_gap(Gap(2, (0, 0), ((1, 0), (0, 1)), (1, 1)))
        ok, witness = subset_check(grid, lambda p: p[0] ** 2 + p[1] ** 2 <= 1)
        assert not ok
        assert witness is not None
        assert witness[0] ** 2 + witness[1] ** 2 > 1
        assert witness in grid


class TestProjectCount:
    def test_grid_diagonal(self):
        grid = enum_gap(Gap(2, (0, 0), ((1, 0), (0, 1)), (1, 1)))
        count, fiber = project_count(grid, (1, 1))
        assert count == 5
        assert fiber == 3

    def test_zero_functional(self):
        grid = enum_gap(Gap(2, (0, 0), ((1, 0), (0, 1)), (1, 1)))
        count, fiber = project_count(grid, (0, 0))
        assert count == 1
        assert fiber == len(grid)

    def test_disk_first_coordinate(self):
        pts = enum_body(disk(4))
        count, fiber = project_count(pts, (1, 0))
        assert count == 5
        # fiber over x=0 is (0,-2)..(0,2)
        assert fiber == 5

    def test_dimension_mismatch(self):
        pts = enum_body(disk(4))
        with pytest.raises(DimensionError):
            project_count(pts, (1,))

    @given(
        st.lists(st.tuples(st.integers(-5, 5), st.integers(-5, 5)), min_size=1, max_size=30),
        st.tuples(st.integers(-4, 4), st.integers(-4, 4)),
    )
    @settings(max_examples=40, deadline=None)
    def test_consistency(self, raw_pts, phi):
        s = PointSet(2, raw_pts)
        count, fiber = project_count(s, phi)
        # fibers partition the set; the largest times the image count covers it
        assert fiber * count >= len(s)
        assert count <= len(s)


def test_pointset_dedup_and_order():
    s = PointSet(2, [(1, 1), (0, 0), (1, 1), (-1, 2)])
    assert s.points == ((-1, 2), (0, 0), (1, 1))
    assert (1, 1) in s
    assert (2, 2) not in s
