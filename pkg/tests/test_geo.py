"""Great-circle distances and point-to-polyline matching."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semweave.geo import (
    EARTH_RADIUS_METERS,
    GeoPoint,
    haversine_meters,
    nearest_segment,
    parse_point,
    parse_polyline,
    point_to_polyline_meters,
)

from oracles import dense_polyline_distance

HANNOVER = GeoPoint(52.3759, 9.7320)
BERLIN = GeoPoint(52.5200, 13.4050)


class TestHaversine:
    def test_zero_distance(self):
        assert haversine_meters(HANNOVER, HANNOVER) == 0.0

    def test_symmetry(self):
        assert haversine_meters(HANNOVER, BERLIN) == haversine_meters(BERLIN, HANNOVER)

    def test_hannover_to_berlin(self):
        assert abs(haversine_meters(HANNOVER, BERLIN) - 249_000) < 1_000

    def test_one_degree_longitude_at_equator(self):
        import math
        d = haversine_meters(GeoPoint(0, 0), GeoPoint(0, 1))
        assert abs(d - EARTH_RADIUS_METERS * math.pi / 180) < 1e-6

    @settings(max_examples=50, deadline=None)
    @given(st.floats(-90, 90), st.floats(-180, 180),
           st.floats(-90, 90), st.floats(-180, 180))
    def test_non_negative_and_symmetric(self, lat1, lon1, lat2, lon2):
        a, b = GeoPoint(lat1, lon1), GeoPoint(lat2, lon2)
        assert haversine_meters(a, b) >= 0.0
        assert haversine_meters(a, b) == haversine_meters(b, a)


class TestParsing:
    def test_parse_point(self):
        assert parse_point("52.37930", "9.73015") == GeoPoint(52.37930, 9.73015)

    def test_parse_point_range(self):
        with pytest.raises(ValueError):
            parse_point("91.0", "0.0")
        with pytest.raises(ValueError):
            parse_point("0.0", "181.0")
        with pytest.raises(ValueError):
            parse_point("abc", "0.0")

    def test_parse_polyline(self):
        line = parse_polyline("52.37925 9.72980 52.37935 9.73050")
        assert line == [GeoPoint(52.37925, 9.72980), GeoPoint(52.37935, 9.73050)]

    def test_parse_polyline_rejects_odd_token_count(self):
        with pytest.raises(ValueError):
            parse_polyline("52.0 9.0 52.1")

    def test_parse_polyline_rejects_single_point(self):
        with pytest.raises(ValueError):
            parse_polyline("52.0 9.0")

    def test_parse_polyline_rejects_repeated_point(self):
        with pytest.raises(ValueError):
            parse_polyline("52.0 9.0 52.0 9.0")

    def test_parse_polyline_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            parse_polyline("95.0 9.0 52.0 9.0")


class TestPointToPolyline:
    def test_point_on_vertex(self):
        line = (GeoPoint(52.0, 9.0), GeoPoint(52.0, 9.01))
        assert point_to_polyline_meters(GeoPoint(52.0, 9.0), line) < 1e-6

    def test_point_beside_midpoint(self):
        # A point offset 0.0001 deg latitude (~11.1 m) from a west-east segment.
        line = (GeoPoint(52.0, 9.0), GeoPoint(52.0, 9.01))
        d = point_to_polyline_meters(GeoPoint(52.0001, 9.005), line)
        assert abs(d - 11.1) < 0.2

    def test_point_beyond_endpoint_clamps(self):
        line = (GeoPoint(52.0, 9.0), GeoPoint(52.0, 9.01))
        p = GeoPoint(52.0, 9.02)
        expected = haversine_meters(p, GeoPoint(52.0, 9.01))
        assert abs(point_to_polyline_meters(p, line) - expected) < 0.01

    def test_multi_leg_takes_minimum(self):
        line = (GeoPoint(52.0, 9.0), GeoPoint(52.0, 9.01), GeoPoint(52.01, 9.01))
        p = GeoPoint(52.005, 9.0101)
        per_leg = min(
            point_to_polyline_meters(p, line[:2]),
            point_to_polyline_meters(p, line[1:]))
        assert point_to_polyline_meters(p, line) == per_leg


class TestNearestSegment:
    LINES = (
        (GeoPoint(52.0, 9.00), GeoPoint(52.0, 9.01)),
        (GeoPoint(52.1, 9.00), GeoPoint(52.1, 9.01)),
        (GeoPoint(52.2, 9.00), GeoPoint(52.2, 9.01)),
    )

    def test_picks_closest(self):
        hit = nearest_segment(GeoPoint(52.1001, 9.005), self.LINES,
                              max_distance=1000)
        assert hit is not None
        index, distance = hit
        assert index == 1
        assert abs(distance - 11.1) < 0.2

    def test_none_when_all_beyond_limit(self):
        assert nearest_segment(GeoPoint(53.0, 9.0), self.LINES,
                               max_distance=50) is None

    def test_tie_prefers_lowest_index(self):
        duplicated = (self.LINES[0], self.LINES[0])
        hit = nearest_segment(GeoPoint(52.0001, 9.005), duplicated,
                              max_distance=1000)
        assert hit is not None and hit[0] == 0

    def test_empty_candidates_rejected(self):
        with pytest.raises(ValueError):
            nearest_segment(GeoPoint(52.0, 9.0), (), max_distance=50)


class TestAgainstDenseOracle:
    def random_case(self, rng: random.Random):
        lat0 = rng.uniform(-60, 60)
        lon0 = rng.uniform(-170, 170)
        points = [GeoPoint(lat0, lon0)]
        for _ in range(rng.randint(1, 3)):
            last = points[-1]
            points.append(GeoPoint(last.lat + rng.uniform(-0.0005, 0.0005),
                                   last.lon + rng.uniform(0.0001, 0.0005)))
        p = GeoPoint(lat0 + rng.uniform(-0.001, 0.001),
                     lon0 + rng.uniform(-0.001, 0.001))
        return p, tuple(points)

    def test_matches_dense_sampling(self):
        rng = random.Random(1887)
        for _ in range(10):
            p, line = self.random_case(rng)
            fast = point_to_polyline_meters(p, line)
            dense = dense_polyline_distance(p, line)
            assert abs(fast - dense) <= 0.5, (p, line, fast, dense)
