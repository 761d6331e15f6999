import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from catprox.errors import DomainError, ParseError, SpaceMismatch
from catprox.sets import Ball, Halfspace, Segment, SpiderLeg, set_from_json
from catprox.spaces import (
    GEO_TOL,
    Point,
    distance,
    geodesic_point,
    hyperboloid_from_spatial,
    origin,
)

from conftest import E2, H2, S3, assert_close, point_in


def euclidean_sets():
    return st.sampled_from([
        Ball(Point(E2, (0.0, 0.0)), 1.0),
        Ball(Point(E2, (1.0, -2.0)), 2.5),
        Segment(Point(E2, (-1.0, 0.0)), Point(E2, (2.0, 3.0))),
        Halfspace(E2, (0.0, 1.0), 0.0),
        Halfspace(E2, (3.0, 4.0), 2.0),
    ])


def spider_sets():
    return st.sampled_from([
        Ball(Point(S3, (1, 2.0)), 1.5),
        Ball(origin(S3), 1.0),
        Segment(Point(S3, (1, 2.0)), Point(S3, (2, 1.0))),
        SpiderLeg(S3, 2),
    ])


def hyperboloid_sets():
    return st.sampled_from([
        Ball(origin(H2), 1.2),
        Ball(hyperboloid_from_spatial(H2, (1.0, 1.0)), 0.7),
        Segment(hyperboloid_from_spatial(H2, (-1.0, 0.5)),
                hyperboloid_from_spatial(H2, (2.0, -1.0))),
    ])


class TestProjectionExamples:
    def test_ball_radial(self):
        b = Ball(Point(E2, (0.0, 0.0)), 1.0)
        assert b.project(Point(E2, (3.0, 0.0))).coords == (1.0, 0.0)

    def test_halfspace(self):
        h = Halfspace(E2, (0.0, 1.0), 0.0)
        assert h.project(Point(E2, (0.0, 2.0))).coords == (0.0, 0.0)

    def test_halfspace_normal_not_axis_aligned(self):
        h = Halfspace(E2, (1.0, 1.0), 0.0)
        p = h.project(Point(E2, (2.0, 0.0)))
        assert_close(p.coords[0], 1.0, 1e-12)
        assert_close(p.coords[1], -1.0, 1e-12)

    def test_spider_leg_from_other_leg(self):
        leg = SpiderLeg(S3, 2)
        assert leg.project(Point(S3, (1, 1.7))) == origin(S3)

    def test_spider_leg_keeps_own_points(self):
        leg = SpiderLeg(S3, 2)
        x = Point(S3, (2, 3.0))
        assert leg.project(x) == x

    def test_ball_interior_fixed(self):
        b = Ball(Point(E2, (0.0, 0.0)), 1.0)
        x = Point(E2, (0.25, 0.25))
        assert b.project(x) == x

    def test_spider_ball_cross_leg(self):
        b = Ball(Point(S3, (2, 3.0)), 1.0)
        got = b.project(Point(S3, (1, 2.0)))
        assert got.leg == 2
        assert_close(got.radius, 2.0, 1e-12)

    def test_segment_euclidean_matches_closed_form(self):
        a, b = Point(E2, (0.0, 0.0)), Point(E2, (4.0, 0.0))
        seg = Segment(a, b)
        rng = np.random.default_rng(7)
        for _ in range(50):
            x = Point(E2, tuple(rng.uniform(-6, 6, size=2)))
            t = min(max(x.coords[0] / 4.0, 0.0), 1.0)
            expect = (4.0 * t, 0.0)
            got = seg.project(x)
            assert_close(got.coords[0], expect[0], 1e-12)
            assert_close(got.coords[1], expect[1], 1e-12)

    def test_degenerate_segment(self):
        a = Point(E2, (1.0, 1.0))
        seg = Segment(a, a)
        assert seg.project(Point(E2, (5.0, -3.0))) == a

    def test_hyperboloid_segment_vs_grid(self):
        a = hyperboloid_from_spatial(H2, (-1.0, 0.2))
        b = hyperboloid_from_spatial(H2, (1.5, -0.4))
        seg = Segment(a, b)
        x = hyperboloid_from_spatial(H2, (0.3, 1.8))
        got = seg.project(x)
        best = min((distance(x, geodesic_point(a, b, k / 20000.0))
                    for k in range(20001)))
        assert distance(x, got) <= best + 1e-7

    def test_space_mismatch(self):
        b = Ball(Point(E2, (0.0, 0.0)), 1.0)
        with pytest.raises(SpaceMismatch):
            b.project(origin(S3))


class TestContains:
    def test_ball_inside(self):
        b = Ball(Point(E2, (0.0, 0.0)), 1.0)
        assert b.contains(Point(E2, (0.5, 0.0)), 1e-9)

    def test_ball_outside(self):
        b = Ball(Point(E2, (0.0, 0.0)), 1.0)
        assert not b.contains(Point(E2, (2.0, 0.0)), 1e-9)

    def test_halfspace_tolerance_band(self):
        h = Halfspace(E2, (0.0, 1.0), 0.0)
        assert h.contains(Point(E2, (5.0, 1e-12)), 1e-9)

    def test_matches_projection_distance(self):
        b = Ball(Point(E2, (1.0, -2.0)), 2.5)
        for x in (Point(E2, (4.0, 4.0)), Point(E2, (1.0, 0.0))):
            inside = b.contains(x, GEO_TOL)
            assert inside == (distance(x, b.project(x)) <= GEO_TOL)


class TestInvariants:
    def test_bad_radius(self):
        with pytest.raises(DomainError):
            Ball(Point(E2, (0.0, 0.0)), 0.0)
        with pytest.raises(DomainError):
            Ball(Point(E2, (0.0, 0.0)), -1.0)

    def test_halfspace_normalizes(self):
        h = Halfspace(E2, (3.0, 4.0), 10.0)
        assert_close(math.hypot(*h.normal), 1.0, 1e-12)
        assert_close(h.offset, 2.0, 1e-12)

    def test_halfspace_zero_normal(self):
        with pytest.raises(DomainError):
            Halfspace(E2, (0.0, 0.0), 1.0)

    def test_halfspace_euclidean_only(self):
        with pytest.raises(DomainError):
            Halfspace(H2, (0.0, 1.0, 0.0), 0.0)

    def test_spider_leg_bad_index(self):
        with pytest.raises(DomainError):
            SpiderLeg(S3, 0)
        with pytest.raises(DomainError):
            SpiderLeg(S3, 4)

    def test_segment_endpoints_same_space(self):
        with pytest.raises(SpaceMismatch):
            Segment(Point(E2, (0.0, 0.0)), origin(S3))

    def test_compactness_flags(self):
        assert Ball(Point(E2, (0.0, 0.0)), 1.0).is_compact
        assert Segment(Point(E2, (0.0, 0.0)), Point(E2, (1.0, 0.0))).is_compact
        assert not Halfspace(E2, (0.0, 1.0), 0.0).is_compact
        assert not SpiderLeg(S3, 1).is_compact


class TestProjectionLaws:
    @given(euclidean_sets(), point_in(E2))
    def test_idempotent_euclidean(self, c, x):
        p = c.project(x)
        assert distance(p, c.project(p)) <= GEO_TOL

    @given(spider_sets(), point_in(S3))
    def test_idempotent_spider(self, c, x):
        p = c.project(x)
        assert distance(p, c.project(p)) <= GEO_TOL

    @given(hyperboloid_sets(), point_in(H2))
    @settings(max_examples=60)
    def test_idempotent_hyperboloid(self, c, x):
        p = c.project(x)
        assert distance(p, c.project(p)) <= 1e-6

    @given(euclidean_sets(), point_in(E2), point_in(E2))
    def test_nonexpansive_euclidean(self, c, x, y):
        assert (distance(c.project(x), c.project(y))
                <= distance(x, y) + GEO_TOL)

    @given(spider_sets(), point_in(S3), point_in(S3))
    def test_nonexpansive_spider(self, c, x, y):
        assert (distance(c.project(x), c.project(y))
                <= distance(x, y) + GEO_TOL)

    @given(euclidean_sets(), point_in(E2), point_in(E2))
    def test_quasi_nonexpansive_at_members(self, c, x, q_raw):
        q = c.project(q_raw)
        assert distance(c.project(x), q) <= distance(x, q) + GEO_TOL

    @given(euclidean_sets(), point_in(E2), point_in(E2))
    def test_projection_is_nearest_among_members(self, c, x, y_raw):
        y = c.project(y_raw)
        assert distance(x, c.project(x)) <= distance(x, y) + GEO_TOL


class TestSamplers:
    @given(euclidean_sets(), st.integers(0, 2 ** 31 - 1))
    @settings(max_examples=40)
    def test_samples_are_members_euclidean(self, c, seed):
        rng = np.random.default_rng(seed)
        x = c.sample(rng)
        assert c.contains(x, 1e-7)

    @given(spider_sets(), st.integers(0, 2 ** 31 - 1))
    @settings(max_examples=40)
    def test_samples_are_members_spider(self, c, seed):
        rng = np.random.default_rng(seed)
        x = c.sample(rng)
        assert c.contains(x, 1e-7)

    @given(hyperboloid_sets(), st.integers(0, 2 ** 31 - 1))
    @settings(max_examples=40)
    def test_samples_are_members_hyperboloid(self, c, seed):
        rng = np.random.default_rng(seed)
        x = c.sample(rng)
        assert c.contains(x, 1e-6)


class TestJson:
    def test_ball_roundtrip(self):
        b = Ball(Point(E2, (0.0, 3.0)), 3.0)
        assert set_from_json(E2, b.to_json(), "sets[0]") == b

    def test_halfspace_roundtrip(self):
        h = Halfspace(E2, (0.0, 1.0), 0.0)
        assert set_from_json(E2, h.to_json(), "sets[0]") == h

    def test_segment_roundtrip(self):
        s = Segment(Point(E2, (-1.0, 0.0)), Point(E2, (2.0, 3.0)))
        assert set_from_json(E2, s.to_json(), "sets[0]") == s

    def test_spider_shapes_roundtrip(self):
        for c in (Ball(Point(S3, (1, 2.0)), 1.0), SpiderLeg(S3, 2)):
            assert set_from_json(S3, c.to_json(), "sets[0]") == c

    def test_unknown_type_rejected(self):
        with pytest.raises(ParseError) as e:
            set_from_json(E2, {"type": "cone"}, "sets[3]")
        assert "sets[3]" in str(e.value)

    def test_unknown_key_rejected(self):
        with pytest.raises(ParseError):
            set_from_json(E2, {"type": "ball", "center": [0, 0],
                               "radius": 1, "extra": 1}, "sets[0]")

    def test_bad_radius_is_parse_error_with_path(self):
        with pytest.raises(ParseError) as e:
            set_from_json(E2, {"type": "ball", "center": [0, 0],
                               "radius": -1}, "problem.sets[1]")
        assert "problem.sets[1]" in str(e.value)
