"""Composite spatial vectors and the standardization step.

Three parts make up the representation of a place: a multi-scale sin/cos
encoding of its coordinates, a feature-hash embedding of the text describing
it, and an optional time-windowed embedding of events happening there. The
three blocks are concatenated (each block scaled to unit norm so no signal
drowns the others) and projected by a fixed seeded random-sign matrix down to
the text-embedding dimensionality, so one index serves text and spatial
content alike.

Everything here is pure and deterministic for a fixed config: token hashing
and the projection matrix both derive from keyed blake2b streams, not from a
process- or library-dependent RNG.
"""

from __future__ import annotations

import hashlib
import math
import string
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Protocol, Sequence

import numpy as np

from .config import DEFAULT_CONFIG, EngineConfig
from .errors import DimensionMismatch, MissingWindow
from .geomodel import GeoPoint, LandmarkRecord, TimeWindow
from .geotext.tokens import Token

_STRIP_CHARS = string.punctuation + "°“”‘’"


class ExternalEmbedder(Protocol):
    """Contract for substituting a learned embedder: must be deterministic
    per (input, configuration) to preserve the engine's reproducibility."""

    def __call__(self, tokens: Sequence[str], dim: int) -> Sequence[float]: ...


def norm_tokens(items: Iterable[str | Token]) -> list[str]:
    """Canonical embedding tokens: casefolded, surrounding punctuation stripped."""
    out = []
    for item in items:
        text = item.text if isinstance(item, Token) else item
        cleaned = text.casefold().strip(_STRIP_CHARS)
        if cleaned:
            out.append(cleaned)
    return out


def text_tokens(text: str) -> list[str]:
    """Whitespace-split a string into canonical embedding tokens."""
    return norm_tokens(text.split())


def _hash64(token: str, seed: int) -> int:
    key = (seed & 0xFFFFFFFFFFFFFFFF).to_bytes(8, "little")
    digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8, key=key).digest()
    return int.from_bytes(digest, "little")


def embed_text(tokens: Sequence[str | Token], dim: int, seed: int = DEFAULT_CONFIG.hash_seed) -> np.ndarray:
    """Signed feature hashing: index from h mod dim, sign from the top hash bit,
    accumulated and L2-normalized. Empty input gives the zero vector."""
    if dim < 1:
        raise DimensionMismatch(f"dim must be >= 1, got {dim}")
    vec = np.zeros(dim, dtype=np.float64)
    for item in tokens:
        text = item.text if isinstance(item, Token) else item
        h = _hash64(text, seed)
        sign = 1.0 if (h >> 63) & 1 else -1.0
        vec[h % dim] += sign
    norm = float(np.linalg.norm(vec))
    if norm > 0.0:
        vec /= norm
    return vec


def encode_location(p: GeoPoint, d_loc: int = DEFAULT_CONFIG.d_loc) -> np.ndarray:
    """Multi-scale trigonometric position code.

    For scales s_k = 2^k degrees, each scale contributes
    [sin(pi*lat/s_k), cos(pi*lat/s_k), sin(pi*lon/s_k), cos(pi*lon/s_k)],
    so equal points always map to equal vectors and every component is in
    [-1, 1]. The full vector has constant norm sqrt(d_loc / 2).
    """
    scales = d_loc // 4
    vec = np.empty(d_loc, dtype=np.float64)
    for k in range(scales):
        s_k = float(2**k)
        a_lat = math.pi * p.lat / s_k
        a_lon = math.pi * p.lon / s_k
        vec[4 * k : 4 * k + 4] = (math.sin(a_lat), math.cos(a_lat), math.sin(a_lon), math.cos(a_lon))
    return vec


@lru_cache(maxsize=8)
def _projection_matrix(seed: int, d_out: int, d_in: int) -> np.ndarray:
    """Fixed +-1/sqrt(d_out) matrix from a keyed blake2b counter stream.

    Independent of numpy's RNG so standardized vectors reproduce bit-for-bit
    across platforms and library versions.
    """
    key = (seed & 0xFFFFFFFFFFFFFFFF).to_bytes(8, "little")
    n_bytes = (d_out * d_in + 7) // 8
    chunks = []
    counter = 0
    while sum(len(c) for c in chunks) < n_bytes:
        chunks.append(hashlib.blake2b(counter.to_bytes(8, "little"), digest_size=64, key=key).digest())
        counter += 1
    bits = np.unpackbits(np.frombuffer(b"".join(chunks), dtype=np.uint8)[:n_bytes])[: d_out * d_in]
    signs = bits.astype(np.float64) * 2.0 - 1.0
    matrix = signs.reshape(d_out, d_in) / math.sqrt(d_out)
    matrix.setflags(write=False)
    return matrix


def project(vec: np.ndarray, config: EngineConfig = DEFAULT_CONFIG) -> np.ndarray:
    """The linear part of standardize (no normalization)."""
    arr = np.asarray(vec, dtype=np.float64)
    if arr.shape != (config.concat_dim,):
        raise DimensionMismatch(f"expected length {config.concat_dim}, got {arr.shape}")
    matrix = _projection_matrix(config.projection_seed, config.d_text, config.concat_dim)
    return matrix @ arr


def standardize(vec: np.ndarray, config: EngineConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Project the concatenated composite down to d_text and L2-normalize
    nonzero results. Zero input maps to the zero vector."""
    projected = project(vec, config)
    norm = float(np.linalg.norm(projected))
    if norm > 0.0:
        projected /= norm
    return projected


@dataclass(frozen=True, eq=False)
class DynamicVector:
    """Time-windowed embedding of events at a location."""

    values: np.ndarray
    window: TimeWindow


@dataclass(frozen=True, eq=False)
class CompositeSpatialVector:
    location: np.ndarray
    spatial_text: np.ndarray
    dynamic: DynamicVector | None
    standardized: np.ndarray

    def concat(self, config: EngineConfig = DEFAULT_CONFIG) -> np.ndarray:
        dyn = self.dynamic.values if self.dynamic is not None else None
        return composite_concat(self.location, self.spatial_text, dyn, config)

    def verify(self, config: EngineConfig = DEFAULT_CONFIG, atol: float = 1e-12) -> bool:
        """Recomputability check: standardized equals standardize(concat)."""
        return bool(np.allclose(self.standardized, standardize(self.concat(config), config), atol=atol))


def composite_concat(
    location: np.ndarray,
    spatial_text: np.ndarray,
    dynamic: np.ndarray | None,
    config: EngineConfig = DEFAULT_CONFIG,
) -> np.ndarray:
    """Concatenate the three blocks, location scaled by its constant norm so
    each block enters with unit weight; an absent dynamic block is zeros."""
    loc = np.asarray(location, dtype=np.float64) / math.sqrt(config.d_loc / 2)
    st = np.asarray(spatial_text, dtype=np.float64)
    dyn = np.zeros(config.d_dyn) if dynamic is None else np.asarray(dynamic, dtype=np.float64)
    if loc.shape != (config.d_loc,) or st.shape != (config.d_st,) or dyn.shape != (config.d_dyn,):
        raise DimensionMismatch(
            f"block shapes {loc.shape}/{st.shape}/{dyn.shape} do not match config "
            f"{config.d_loc}/{config.d_st}/{config.d_dyn}"
        )
    return np.concatenate([loc, st, dyn])


def make_composite(
    landmark: LandmarkRecord,
    event_text: str | None = None,
    config: EngineConfig = DEFAULT_CONFIG,
    embedder: ExternalEmbedder | None = None,
) -> CompositeSpatialVector:
    """Build the three-part vector for a landmark and its standardized form.

    event_text requires the landmark to carry a TimeWindow; without an event
    the dynamic slot contributes zeros to the concatenation.
    """
    embed = embedder if embedder is not None else (lambda toks, dim: embed_text(toks, dim, config.hash_seed))
    location = encode_location(landmark.point, config.d_loc)
    st_tokens = text_tokens(f"{landmark.name} {landmark.category} {landmark.description}")
    spatial_text = np.asarray(embed(st_tokens, config.d_st), dtype=np.float64)

    dynamic = None
    if event_text is not None:
        if landmark.window is None:
            raise MissingWindow(f"landmark {landmark.id!r} has event text but no time window")
        dynamic = DynamicVector(
            values=np.asarray(embed(text_tokens(event_text), config.d_dyn), dtype=np.float64),
            window=landmark.window,
        )

    concat = composite_concat(location, spatial_text, dynamic.values if dynamic else None, config)
    return CompositeSpatialVector(
        location=location,
        spatial_text=spatial_text,
        dynamic=dynamic,
        standardized=standardize(concat, config),
    )


def query_vector(
    tokens: Sequence[str | Token],
    config: EngineConfig = DEFAULT_CONFIG,
) -> np.ndarray:
    """Standardized query vector built through the same pipeline as records.

    The location and dynamic blocks are zero: spatial proximity and temporal
    overlap are scored separately by the hybrid search, so the query vector
    carries only the text signal.
    """
    st = embed_text(norm_tokens(tokens), config.d_st, config.hash_seed)
    concat = np.concatenate([np.zeros(config.d_loc), st, np.zeros(config.d_dyn)])
    return standardize(concat, config)
