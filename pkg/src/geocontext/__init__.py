"""GeoContext engine: geo-aware tokenization, composite spatial vectors,
hybrid text+spatial+temporal search, native geospatial computation, and
retrieval-augmented context assembly with citations."""

from .config import DEFAULT_CONFIG, EngineConfig, load_config
from .geomodel import (
    AdminArea,
    BoundingBox,
    GeoPoint,
    LandmarkRecord,
    TimeWindow,
    normalize_point,
    point_in_bbox,
)
from .vectorstore import HybridIndex, QuerySpec, ScoredHit, VectorRecord, geohash_encode

__version__ = "0.1.0"

__all__ = [
    "AdminArea",
    "BoundingBox",
    "DEFAULT_CONFIG",
    "EngineConfig",
    "GeoPoint",
    "HybridIndex",
    "LandmarkRecord",
    "QuerySpec",
    "ScoredHit",
    "TimeWindow",
    "VectorRecord",
    "geohash_encode",
    "load_config",
    "normalize_point",
    "point_in_bbox",
    "__version__",
]
