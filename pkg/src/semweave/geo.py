"""Geographic primitives: haversine distance and nearest-polyline search.

Distances between points use the haversine great-circle formula with an
Earth radius of 6,371,000 m. Point-to-polyline distance projects each leg
into a local equirectangular plane centered at the query point, which is
accurate to well under a meter for legs up to a kilometer.
"""

from __future__ import annotations

import math
from typing import NamedTuple, Optional, Sequence

EARTH_RADIUS_METERS = 6_371_000.0


class GeoPoint(NamedTuple):
    lat: float
    lon: float


def parse_point(lat_text: str, lon_text: str) -> GeoPoint:
    """Parse and range-check a latitude/longitude pair."""
    lat = float(lat_text)
    lon = float(lon_text)
    if not (-90.0 <= lat <= 90.0):
        raise ValueError(f"latitude {lat} out of range [-90, 90]")
    if not (-180.0 <= lon <= 180.0):
        raise ValueError(f"longitude {lon} out of range [-180, 180]")
    return GeoPoint(lat, lon)


def parse_polyline(text: str) -> list[GeoPoint]:
    """Parse ``lat lon lat lon ...`` into a polyline of at least two points."""
    tokens = text.split()
    if len(tokens) < 4 or len(tokens) % 2 != 0:
        raise ValueError(
            f"polyline needs an even number of at least 4 coordinates, got {len(tokens)}")
    points = [parse_point(tokens[i], tokens[i + 1]) for i in range(0, len(tokens), 2)]
    for a, b in zip(points, points[1:]):
        if a == b:
            raise ValueError(f"zero-length polyline segment at {a}")
    return points


def haversine_meters(a: GeoPoint, b: GeoPoint) -> float:
    lat1, lon1, lat2, lon2 = map(math.radians, (a.lat, a.lon, b.lat, b.lon))
    sin_dlat = math.sin((lat2 - lat1) / 2.0)
    sin_dlon = math.sin((lon2 - lon1) / 2.0)
    h = sin_dlat * sin_dlat + math.cos(lat1) * math.cos(lat2) * sin_dlon * sin_dlon
    return 2.0 * EARTH_RADIUS_METERS * math.asin(min(1.0, math.sqrt(h)))


def _project(point: GeoPoint, origin: GeoPoint) -> tuple[float, float]:
    x = math.radians(point.lon - origin.lon) * math.cos(math.radians(origin.lat))
    y = math.radians(point.lat - origin.lat)
    return (x * EARTH_RADIUS_METERS, y * EARTH_RADIUS_METERS)


def _distance_to_segment(p: GeoPoint, a: GeoPoint, b: GeoPoint) -> float:
    # p maps to the origin of the local plane.
    ax, ay = _project(a, p)
    bx, by = _project(b, p)
    dx, dy = bx - ax, by - ay
    length_sq = dx * dx + dy * dy
    if length_sq == 0.0:
        return math.hypot(ax, ay)
    t = max(0.0, min(1.0, -(ax * dx + ay * dy) / length_sq))
    return math.hypot(ax + t * dx, ay + t * dy)


def point_to_polyline_meters(p: GeoPoint, polyline: Sequence[GeoPoint]) -> float:
    if not polyline:
        raise ValueError("empty polyline")
    if len(polyline) == 1:
        return haversine_meters(p, polyline[0])
    return min(_distance_to_segment(p, a, b)
               for a, b in zip(polyline, polyline[1:]))


def nearest_segment(p: GeoPoint, segments: Sequence[Sequence[GeoPoint]],
                    max_distance: float) -> Optional[tuple[int, float]]:
    """Index and distance of the closest polyline within ``max_distance``.

    Ties resolve to the lowest index. Raises on an empty segment list.
    """
    if not segments:
        raise ValueError("nearest_segment requires at least one candidate")
    best: Optional[tuple[int, float]] = None
    for index, polyline in enumerate(segments):
        distance = point_to_polyline_meters(p, polyline)
        if best is None or distance < best[1]:
            best = (index, distance)
    assert best is not None
    if best[1] > max_distance:
        return None
    return best
