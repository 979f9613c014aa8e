"""Coordinates and distances on the latitude/longitude plane.

Distances default to plain Euclidean distance in degree space, which is how
the search radius is expressed for the surveys (0.6 degrees spans ~66 km of
latitude but only 19-27 km of longitude at Arctic latitudes). A haversine
metric in kilometres is available for metric-accurate studies.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

EARTH_RADIUS_KM = 6371.0
KM_PER_DEGREE_LAT = 111.0  # rounded down, so degree margins derived from it are conservative


class InvalidCoordinateError(ValueError):
    pass


class DistanceMetric(str, enum.Enum):
    DEGREE_EUCLIDEAN = "degree"
    HAVERSINE_KM = "haversine-km"


@dataclass(frozen=True)
class Coordinate:
    lat: float
    lon: float

    def __post_init__(self):
        lat, lon = float(self.lat), float(self.lon)
        if not (math.isfinite(lat) and math.isfinite(lon)):
            raise InvalidCoordinateError(f"non-finite coordinate ({self.lat}, {self.lon})")
        if not -90.0 <= lat <= 90.0:
            raise InvalidCoordinateError(f"latitude {lat} outside [-90, 90]")
        if not -180.0 <= lon <= 180.0:
            raise InvalidCoordinateError(f"longitude {lon} outside [-180, 180]")
        object.__setattr__(self, "lat", lat)
        object.__setattr__(self, "lon", lon)

    def __iter__(self):
        yield self.lat
        yield self.lon


def degree_distance(a: Coordinate, b: Coordinate) -> float:
    return math.hypot(a.lat - b.lat, a.lon - b.lon)


def haversine_km(a: Coordinate, b: Coordinate) -> float:
    """Great-circle distance on a sphere of radius 6371 km."""
    phi1, phi2 = math.radians(a.lat), math.radians(b.lat)
    dphi = math.radians(b.lat - a.lat)
    dlam = math.radians(b.lon - a.lon)
    h = math.sin(dphi / 2) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlam / 2) ** 2
    return 2 * EARTH_RADIUS_KM * math.asin(math.sqrt(min(1.0, h)))


def distance(metric: DistanceMetric, a: Coordinate, b: Coordinate) -> float:
    if metric is DistanceMetric.HAVERSINE_KM:
        return haversine_km(a, b)
    return degree_distance(a, b)


def degree_margins(metric: DistanceMetric, center: Coordinate, radius: float) -> tuple[float, float]:
    """Half-widths (lat, lon) in degrees of a box containing every point within `radius` of `center`.

    Exact for the degree metric. For haversine the box is conservative: the
    latitude margin uses 111 km per degree and the longitude margin is the
    exact extent of the spherical cap, widened to the full range when the cap
    reaches a pole.
    """
    if metric is DistanceMetric.DEGREE_EUCLIDEAN:
        return radius, radius
    if math.isinf(radius):
        return math.inf, math.inf
    lat_margin = radius / KM_PER_DEGREE_LAT
    ang = radius / EARTH_RADIUS_KM
    colat = math.pi / 2 - abs(math.radians(center.lat))
    if ang >= colat:
        return lat_margin, math.inf
    ratio = math.sin(ang) / math.cos(math.radians(center.lat))
    if ratio >= 1.0:
        return lat_margin, math.inf
    lon_margin = math.degrees(math.asin(ratio))
    return lat_margin, lon_margin * (1 + 1e-9) + 1e-12
