"""Native geospatial computation over feature files.

Loads a geospatial-JSON (RFC 7946 subset) FeatureCollection of Points and
Polygons, computes distance matrices, nearest joins, radius selections, and
constant-speed travel times, and emits result documents plus a human-readable
analysis summary stating the operation, input sizes, and payload statistics.

Files carry WGS84 lon,lat order; everything is converted to lat,lon
internally. Polygons reduce to the arithmetic mean of their exterior-ring
vertices for distance purposes (documented approximation).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import EmptyInput, NonPositiveSpeed, ParseError, UnsupportedGeometry
from .geomodel import GeoPoint
from .georelate import haversine

SUPPORTED_GEOMETRIES = ("Point", "Polygon")


@dataclass(frozen=True)
class Feature:
    id: str
    geometry: GeoPoint | tuple[GeoPoint, ...]
    properties: dict = field(default_factory=dict)

    @property
    def is_point(self) -> bool:
        return isinstance(self.geometry, GeoPoint)


@dataclass(frozen=True)
class FeatureSet:
    features: tuple[Feature, ...]

    def __len__(self) -> int:
        return len(self.features)

    def representative_points(self) -> list[GeoPoint]:
        return [representative_point(f) for f in self.features]


def representative_point(feature: Feature) -> GeoPoint:
    """The point itself, or the vertex centroid of a polygon's exterior ring
    (closing duplicate excluded)."""
    if feature.is_point:
        return feature.geometry
    ring = feature.geometry
    if len(ring) >= 2 and ring[0] == ring[-1]:
        ring = ring[:-1]
    lat = sum(p.lat for p in ring) / len(ring)
    lon = sum(p.lon for p in ring) / len(ring)
    return GeoPoint(lat, lon)


def _parse_position(pos, where: str) -> GeoPoint:
    if not isinstance(pos, (list, tuple)) or len(pos) < 2:
        raise ParseError(f"{where}: position must be [lon, lat]")
    lon, lat = pos[0], pos[1]
    if not isinstance(lon, (int, float)) or not isinstance(lat, (int, float)):
        raise ParseError(f"{where}: non-numeric coordinates")
    return GeoPoint(float(lat), float(lon))


def parse_feature_collection(doc: dict) -> FeatureSet:
    """Build a FeatureSet from a decoded FeatureCollection document."""
    if not isinstance(doc, dict) or doc.get("type") != "FeatureCollection":
        raise ParseError("expected a FeatureCollection document")
    features: list[Feature] = []
    seen_ids: set[str] = set()
    for i, raw in enumerate(doc.get("features", [])):
        where = f"feature {i}"
        if not isinstance(raw, dict) or raw.get("type") != "Feature":
            raise ParseError(f"{where}: expected a Feature object")
        geom = raw.get("geometry")
        if not isinstance(geom, dict):
            raise UnsupportedGeometry(f"{where}: null or missing geometry")
        gtype = geom.get("type")
        if gtype == "Point":
            geometry: GeoPoint | tuple[GeoPoint, ...] = _parse_position(geom.get("coordinates"), where)
        elif gtype == "Polygon":
            rings = geom.get("coordinates")
            if not isinstance(rings, list) or not rings:
                raise ParseError(f"{where}: polygon needs at least one ring")
            geometry = tuple(_parse_position(pos, where) for pos in rings[0])
            if len(geometry) < 4:
                raise ParseError(f"{where}: polygon ring needs >= 4 positions (closed)")
        else:
            raise UnsupportedGeometry(f"{where}: geometry type {gtype!r} not supported")
        fid = raw.get("id")
        fid = str(fid) if fid is not None else f"f{i}"
        if fid in seen_ids:
            raise ParseError(f"{where}: duplicate feature id {fid!r}")
        seen_ids.add(fid)
        props = raw.get("properties") or {}
        if not isinstance(props, dict):
            raise ParseError(f"{where}: properties must be an object")
        features.append(Feature(id=fid, geometry=geometry, properties=dict(props)))
    return FeatureSet(features=tuple(features))


def load_geo_file(path: str | Path) -> FeatureSet:
    """Parse a geospatial-JSON file into a FeatureSet.

    JSON syntax errors surface as ParseError with line and offset;
    unsupported geometry types name the offending type.
    """
    raw = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, offset=exc.pos, line=exc.lineno) from exc
    return parse_feature_collection(doc)


@dataclass(frozen=True)
class ComputeResult:
    kind: str
    payload: object
    summary: str
    document: dict


def _stats(values: list[float]) -> str:
    if not values:
        return "min=n/a max=n/a mean=n/a"
    return f"min={min(values)!r} max={max(values)!r} mean={math.fsum(values) / len(values)!r}"


def distance_matrix(a: FeatureSet, b: FeatureSet) -> ComputeResult:
    """|A|x|B| matrix of great-circle meters between representative points."""
    if len(a) == 0 or len(b) == 0:
        raise EmptyInput("distance_matrix requires non-empty feature sets")
    pts_a = a.representative_points()
    pts_b = b.representative_points()
    matrix = [[haversine(pa, pb) for pb in pts_b] for pa in pts_a]
    flat = [v for row in matrix for v in row]
    document = {
        "rows": [f.id for f in a.features],
        "cols": [f.id for f in b.features],
        "meters": matrix,
    }
    summary = f"distance_matrix: {len(a)}x{len(b)} features; {_stats(flat)} (meters)"
    return ComputeResult(kind="distance_matrix", payload=matrix, summary=summary, document=document)


def nearest_join(a: FeatureSet, b: FeatureSet) -> ComputeResult:
    """For each feature of A, the closest feature of B (ties by ascending id)."""
    if len(a) == 0 or len(b) == 0:
        raise EmptyInput("nearest_join requires non-empty feature sets")
    pts_b = list(zip(b.features, b.representative_points()))
    pairs: list[tuple[str, str, float]] = []
    for fa, pa in zip(a.features, a.representative_points()):
        best = min(((haversine(pa, pb), fb.id) for fb, pb in pts_b), key=lambda t: (t[0], t[1]))
        pairs.append((fa.id, best[1], best[0]))
    distances = [d for _, _, d in pairs]
    document = {
        "type": "FeatureCollection",
        "features": [
            _point_feature(fa, {"nearest_id": bid, "distance_m": d})
            for (fa, (_, bid, d)) in zip(a.features, pairs)
        ],
    }
    summary = f"nearest_join: {len(a)}x{len(b)} features; {_stats(distances)} (meters)"
    return ComputeResult(kind="nearest_join", payload=pairs, summary=summary, document=document)


def within_radius(a: FeatureSet, center: GeoPoint, r: float) -> ComputeResult:
    """Subset of A within r meters of center, ascending by distance then id."""
    if r < 0:
        raise ValueError(f"radius must be >= 0, got {r}")
    hits = []
    for f, p in zip(a.features, a.representative_points()):
        d = haversine(center, p)
        if d <= r:
            hits.append((d, f.id, f))
    hits.sort(key=lambda t: (t[0], t[1]))
    subset = [(f.id, d) for d, _, f in hits]
    distances = [d for _, d in subset]
    document = {
        "type": "FeatureCollection",
        "features": [_point_feature(f, {"distance_m": d}) for d, _, f in hits],
    }
    summary = (
        f"within_radius: {len(a)} features, center ({center.lat}, {center.lon}), "
        f"radius {r} m, {len(subset)} inside; {_stats(distances)} (meters)"
    )
    return ComputeResult(kind="within_radius", payload=subset, summary=summary, document=document)


def travel_time(d: float, speed: float) -> float:
    """Seconds to cover d meters at a constant speed in m/s."""
    if speed <= 0:
        raise NonPositiveSpeed(f"speed must be > 0, got {speed}")
    return d / speed


def travel_time_result(distances: ComputeResult, speed: float) -> ComputeResult:
    """Convert a distance_matrix result into travel durations at constant speed."""
    if distances.kind != "distance_matrix":
        raise ValueError(f"expected a distance_matrix result, got {distances.kind}")
    if speed <= 0:
        raise NonPositiveSpeed(f"speed must be > 0, got {speed}")
    matrix = [[v / speed for v in row] for row in distances.payload]
    flat = [v for row in matrix for v in row]
    document = {
        "rows": distances.document["rows"],
        "cols": distances.document["cols"],
        "seconds": matrix,
    }
    n_rows, n_cols = len(matrix), len(matrix[0])
    summary = f"travel_time: {n_rows}x{n_cols} features at {speed} m/s; {_stats(flat)} (seconds)"
    return ComputeResult(kind="travel_time", payload=matrix, summary=summary, document=document)


def _point_feature(f: Feature, extra_props: dict) -> dict:
    p = representative_point(f)
    return {
        "type": "Feature",
        "id": f.id,
        "geometry": {"type": "Point", "coordinates": [p.lon, p.lat]},
        "properties": {**f.properties, **extra_props},
    }


def write_result(result: ComputeResult, out_path: str | Path) -> Path:
    """Write the result document to out_path and the analysis summary next to
    it as <out_path>.summary.txt; returns the summary path."""
    out = Path(out_path)
    out.write_text(json.dumps(result.document, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    summary_path = out.with_name(out.name + ".summary.txt")
    summary_path.write_text(result.summary + "\n", encoding="utf-8")
    return summary_path
