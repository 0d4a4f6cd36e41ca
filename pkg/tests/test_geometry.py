import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from boundmon.errors import DimensionError, FeasibilityError, InvalidSetError
from boundmon.geometry import (
    Halfspace,
    IntervalBox,
    UnsafeSpec,
    Zonotope,
    affine_map,
    box_zonotope,
    contains_point,
    from_interval,
    interval_hull,
    intersects,
    intersects_unsafe,
    minkowski_sum,
    order_reduce,
    support,
)

from oracles import brute_force_intersects, hull_by_enumeration, vertices_by_enumeration
from oracles import support as oracle_support

UNIT = Zonotope(np.zeros(2), np.eye(2))


def unit_box_at(x, y):
    return Zonotope([x, y], np.eye(2))


def random_zonotope(rng, n=2, m=None, scale=1.0):
    m = rng.integers(1, 4) if m is None else m
    return Zonotope(rng.uniform(-2, 2, n), rng.uniform(-scale, scale, (n, m)))


def same_vertex_set(a, b):
    return {tuple(np.round(v, 12)) for v in a} == {tuple(np.round(v, 12)) for v in b}


class TestConstruction:
    def test_point_has_no_generators(self):
        z = Zonotope.point([1.0, 2.0])
        assert z.order == 0 and z.dim == 2

    def test_immutable(self):
        with pytest.raises(ValueError):
            UNIT.center[0] = 5.0

    @pytest.mark.parametrize("bad", [np.nan, np.inf])
    def test_rejects_non_finite(self, bad):
        with pytest.raises(InvalidSetError):
            Zonotope([0.0, bad], np.eye(2))

    def test_rejects_shape_mismatch(self):
        with pytest.raises(DimensionError):
            Zonotope([0.0, 0.0], np.ones((3, 1)))

    def test_box_rejects_inverted_bounds(self):
        with pytest.raises(InvalidSetError):
            IntervalBox([1.0], [0.0])

    def test_halfspace_rejects_zero_normal(self):
        with pytest.raises(InvalidSetError):
            Halfspace([0.0, 0.0], 1.0)


class TestFromInterval:
    def test_symmetric_box(self):
        z = from_interval(IntervalBox([-1, -1], [1, 1]))
        np.testing.assert_array_equal(z.center, [0, 0])
        np.testing.assert_array_equal(z.generators, np.eye(2))

    def test_degenerate_is_point(self):
        z = from_interval(IntervalBox([3.0], [3.0]))
        np.testing.assert_array_equal(z.center, [3.0])
        assert z.order == 0

    def test_offset_box_matches_corners(self):
        z = from_interval(IntervalBox([0, -4], [2, 0]))
        np.testing.assert_array_equal(z.center, [1, -2])
        np.testing.assert_array_equal(z.generators, np.diag([1.0, 2.0]))
        corners = np.array([[0, -4], [0, 0], [2, -4], [2, 0]], dtype=float)
        assert same_vertex_set(vertices_by_enumeration(z.center, z.generators), corners)

    def test_empty_dimension_rejected(self):
        with pytest.raises(InvalidSetError):
            IntervalBox([], [])

    @given(st.lists(st.tuples(st.floats(-1e3, 1e3), st.floats(0, 1e3)), min_size=1, max_size=4))
    def test_hull_recovers_box(self, spec):
        lo = np.array([a for a, _ in spec])
        hi = lo + np.array([w for _, w in spec])
        h = interval_hull(from_interval(IntervalBox(lo, hi)))
        assert np.all(h.lower <= lo) and np.all(h.upper >= hi)
        np.testing.assert_allclose(h.lower, lo, atol=1e-9)
        np.testing.assert_allclose(h.upper, hi, atol=1e-9)


class TestAffineMap:
    def test_identity(self):
        z = random_zonotope(np.random.default_rng(0))
        out = affine_map(z, np.eye(2), np.zeros(2))
        assert out.same_as(z)

    def test_scaling(self):
        out = affine_map(UNIT, 2 * np.eye(2))
        np.testing.assert_array_equal(out.center, [0, 0])
        np.testing.assert_array_equal(out.generators, 2 * np.eye(2))

    def test_rotation_matches_mapped_vertices(self):
        z = Zonotope([1.0, 0.0], np.diag([1.0, 2.0]))
        rot = np.array([[0.0, 1.0], [-1.0, 0.0]])
        out = affine_map(z, rot)
        np.testing.assert_array_equal(out.center, [0, -1])
        np.testing.assert_array_equal(out.generators, [[0, 2], [-1, 0]])
        mapped = vertices_by_enumeration(z.center, z.generators) @ rot.T
        assert same_vertex_set(vertices_by_enumeration(out.center, out.generators), mapped)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            affine_map(UNIT, np.eye(3))


class TestMinkowskiSum:
    def test_point_summand_translates(self):
        z = random_zonotope(np.random.default_rng(1))
        out = minkowski_sum(z, Zonotope.point([3.0, -1.0]))
        np.testing.assert_allclose(out.center, z.center + [3.0, -1.0])
        np.testing.assert_array_equal(out.generators, z.generators)

    def test_unit_boxes_double(self):
        h = interval_hull(minkowski_sum(UNIT, UNIT))
        np.testing.assert_array_equal(h.lower, [-2, -2])
        np.testing.assert_array_equal(h.upper, [2, 2])

    def test_support_is_additive(self):
        rng = np.random.default_rng(2)
        a, b = random_zonotope(rng), random_zonotope(rng)
        s = minkowski_sum(a, b)
        for d in rng.normal(size=(16, 2)):
            expect = oracle_support(a.center, a.generators, d) + oracle_support(b.center, b.generators, d)
            assert support(s, d) == pytest.approx(expect, abs=1e-9)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            minkowski_sum(UNIT, Zonotope.point([0.0]))


def test_exactness_against_composed_support():
    rng = np.random.default_rng(3)
    for _ in range(20):
        a, b = random_zonotope(rng), random_zonotope(rng)
        m, off = rng.normal(size=(2, 2)), rng.normal(size=2)
        mapped = affine_map(a, m, off)
        summed = minkowski_sum(a, b)
        for d in rng.normal(size=(32, 2)):
            assert support(mapped, d) == pytest.approx(
                d @ off + oracle_support(a.center, a.generators, m.T @ d), abs=1e-9
            )
            assert support(summed, d) == pytest.approx(
                oracle_support(a.center, a.generators, d) + oracle_support(b.center, b.generators, d), abs=1e-9
            )


class TestIntervalHull:
    def test_point(self):
        h = interval_hull(Zonotope.point([1.5, -2.0]))
        np.testing.assert_array_equal(h.lower, [1.5, -2.0])
        np.testing.assert_array_equal(h.upper, [1.5, -2.0])

    def test_skewed_generators_match_enumeration(self):
        g = np.array([[1.0, 1.0], [0.0, 1.0]])
        h = interval_hull(Zonotope([0.0, 0.0], g))
        lo, hi = hull_by_enumeration(np.zeros(2), g)
        np.testing.assert_array_equal(h.lower, [-2, -1])
        np.testing.assert_array_equal(h.upper, [2, 1])
        np.testing.assert_array_equal(h.lower, lo)
        np.testing.assert_array_equal(h.upper, hi)

    def test_unit_square(self):
        h = interval_hull(UNIT)
        np.testing.assert_array_equal(h.lower, [-1, -1])
        np.testing.assert_array_equal(h.upper, [1, 1])

    def test_contains_random_points(self):
        rng = np.random.default_rng(4)
        z = random_zonotope(rng, n=3, m=5)
        h = interval_hull(z)
        pts = z.sample(rng, 1000)
        assert np.all(pts >= h.lower) and np.all(pts <= h.upper)


class TestIntersects:
    def test_identical(self):
        assert intersects(UNIT, UNIT)

    def test_separated(self):
        assert not intersects(unit_box_at(0, 0), unit_box_at(3, 0))

    def test_overlapping(self):
        assert intersects(unit_box_at(0, 0), unit_box_at(1.5, 0))

    def test_touching_counts(self):
        assert intersects(unit_box_at(0, 0), unit_box_at(2, 0))

    def test_points(self):
        p = Zonotope.point([1.0, 1.0])
        assert intersects(p, p)
        assert intersects(UNIT, p)
        assert not intersects(Zonotope.point([1.0, 1.0 + 1e-3]), p)

    def test_skew_sets_with_overlapping_hulls(self):
        # thin diagonal strips whose hulls overlap but sets do not
        a = Zonotope([0.0, 0.0], [[1.0, 0.01], [1.0, -0.01]])
        b = Zonotope([0.5, -0.5], [[1.0, 0.01], [1.0, -0.01]])
        assert not intersects(a, b)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            intersects(UNIT, Zonotope.point([0.0]))

    def test_solver_failure_is_an_error(self, monkeypatch):
        import boundmon.geometry as geo

        class Fail:
            status, fun, message = 4, None, "numerical difficulties"

        monkeypatch.setattr(geo, "linprog", lambda *a, **k: Fail())
        with pytest.raises(FeasibilityError):
            intersects(UNIT, unit_box_at(0.5, 0.5))

    def test_agrees_with_brute_force_and_is_symmetric(self):
        # b must be full-dimensional for grid membership to be decisive
        rng = np.random.default_rng(5)
        for _ in range(60):
            a = random_zonotope(rng, m=rng.integers(1, 4))
            b = random_zonotope(rng, m=rng.integers(2, 4))
            expect = brute_force_intersects(a.center, a.generators, b.center, b.generators)
            assert intersects(a, b) == expect
            assert intersects(b, a) == expect


class TestUnsafe:
    def test_halfspace_far(self):
        assert not intersects_unsafe(UNIT, UnsafeSpec((Halfspace([1.0, 0.0], 4.0),)))

    def test_halfspace_hit(self):
        assert intersects_unsafe(unit_box_at(4, 0), UnsafeSpec((Halfspace([1.0, 0.0], 4.0),)))

    def test_halfspace_touching_is_closed(self):
        assert intersects_unsafe(UNIT, UnsafeSpec((Halfspace([1.0, 0.0], 1.0),)))

    def test_any_disjunct(self):
        u = UnsafeSpec((Halfspace([1.0, 0.0], 10.0), unit_box_at(1.5, 1.5)))
        assert intersects_unsafe(UNIT, u)
        assert not intersects_unsafe(unit_box_at(-3, -3), u)

    def test_mixed_dimensions_rejected(self):
        with pytest.raises(DimensionError):
            UnsafeSpec((Halfspace([1.0], 0.0), UNIT))


class TestOrderReduce:
    def test_noop_when_small(self):
        z = Zonotope([0.0, 0.0], np.ones((2, 3)))
        assert order_reduce(z, 4) is z

    def test_result_contains_input(self):
        rng = np.random.default_rng(6)
        z = Zonotope(rng.normal(size=2), rng.normal(size=(2, 6)))
        r = order_reduce(z, 4)
        assert r.order <= 4
        assert interval_hull(r).contains_box(interval_hull(z), tol=1e-12)
        pts = z.sample(rng, 1000)
        assert all(contains_point(r, p) for p in pts)

    def test_full_boxing_is_hull(self):
        rng = np.random.default_rng(7)
        z = Zonotope(rng.normal(size=3), rng.normal(size=(3, 7)))
        r = order_reduce(z, 3)
        assert r.same_as(from_interval(interval_hull(z))) or np.allclose(
            r.generators, from_interval(interval_hull(z)).generators
        )
        np.testing.assert_allclose(interval_hull(r).lower, interval_hull(z).lower)

    def test_below_dimension_rejected(self):
        with pytest.raises(InvalidSetError):
            order_reduce(UNIT, 1)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(3, 8), st.integers(2, 5))
    def test_containment_property(self, seed, m, keep):
        rng = np.random.default_rng(seed)
        z = Zonotope(rng.normal(size=2), rng.normal(size=(2, m)))
        r = order_reduce(z, keep)
        for d in rng.normal(size=(20, 2)):
            assert support(r, d) >= support(z, d) - 1e-9
