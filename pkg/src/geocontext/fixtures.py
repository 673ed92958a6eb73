"""Deterministic synthetic fixtures for demos and tests.

Builds a 100-landmark gazetteer around Singapore whose names use globally
unique word pairs (so name queries have an unambiguous best match), plus two
hand-written records: the Marina Bay Sands event landmark with a time window
and the Singapore city anchor. Also writes description fixture files and a
self-retrieval eval dataset.
"""

from __future__ import annotations

import csv
from pathlib import Path

from .config import DEFAULT_CONFIG, EngineConfig
from .geomodel import GeoPoint, LandmarkRecord, TimeWindow
from .ingest import CSV_COLUMNS, CSV_OPTIONAL_COLUMNS, index_gazetteer
from .vectorstore import HybridIndex

# 196 distinct words; two per generated landmark so no two names share a word.
_WORDS = (
    "amber", "basalt", "cedar", "delta", "ember", "falcon", "garnet", "harbor", "indigo", "jasper",
    "kestrel", "lagoon", "maple", "nimbus", "ochre", "pebble", "quartz", "raven", "saffron", "tulip",
    "umber", "velvet", "willow", "yarrow", "zephyr", "aspen", "birch", "coral", "dune", "elder",
    "fern", "ginger", "hazel", "iris", "juniper", "lotus", "mango", "nectar", "onyx", "poppy",
    "quince", "rowan", "sable", "thistle", "walnut", "alder", "bramble", "cypress", "drift", "echo",
    "flint", "gorse", "heather", "inlet", "jade", "kelp", "larch", "marsh", "nettle", "orchid",
    "pine", "reed", "sorrel", "tarn", "vale", "wren", "acacia", "bluff", "cliff", "dale",
    "fjord", "glen", "holly", "ivy", "knoll", "loch", "mesa", "nook", "oak", "prairie",
    "quarry", "ridge", "summit", "terrace", "upland", "vista", "wharf", "arbor", "brook", "canyon",
    "dell", "estuary", "forge", "grove", "haven", "isle", "jetty", "key", "lane", "meadow",
    "notch", "orchard", "pond", "quay", "rapids", "shoal", "trail", "union", "vault", "weir",
    "atlas", "beacon", "cairn", "dome", "ford", "gate", "hall", "keep", "mill", "pier",
    "plaza", "spire", "tower", "court", "market", "garden", "bridge", "square", "fountain", "arcade",
    "gallery", "museum", "temple", "palace", "castle", "abbey", "chapel", "manor", "villa", "lodge",
    "depot", "station", "terminal", "junction", "crossing", "causeway", "esplanade", "promenade", "parkway", "circuit",
    "crescent", "cascade", "rookery", "aviary", "apiary", "grotto", "hollow", "heath", "moor", "fen",
    "bog", "glade", "thicket", "copse", "spinney", "paddock", "pasture", "steppe", "tundra", "taiga",
    "atoll", "reef", "islet", "cove", "sound", "strait", "channel", "basin", "gulf", "cape",
    "bank", "shore", "bight", "firth", "kyle", "ness", "skerry", "holm", "eyot", "ait",
    "bar", "spit", "tombolo", "lido", "strand", "machair",
)

_FILLERS = (
    "serene", "historic", "lively", "quiet", "modern", "ancient", "scenic", "bustling",
    "renovated", "iconic", "popular", "hidden", "restored", "famous", "tranquil", "vibrant",
)

_CATEGORIES = ("landmark", "street", "city")

MBS_ID = "mbs"
SG_ID = "sg"
# Window covering 2020-09 .. 2033-05; query fixtures use EVENT_TIME.
MBS_WINDOW = TimeWindow(1_600_000_000.0, 2_000_000_000.0)
EVENT_TIME = 1_700_000_000.0

if len(set(_WORDS)) != len(_WORDS):  # pragma: no cover - fixture sanity
    raise RuntimeError("fixture word bank has duplicates")


def build_landmarks(n: int = 100) -> list[LandmarkRecord]:
    """n synthetic landmarks; the last two are always the Marina Bay Sands
    event record and the Singapore city anchor."""
    if not 2 <= n <= len(_WORDS) // 2 + 2:
        raise ValueError(f"n must be in [2, {len(_WORDS) // 2 + 2}]")
    records: list[LandmarkRecord] = []
    for i in range(n - 2):
        first, second = _WORDS[2 * i], _WORDS[2 * i + 1]
        name = f"{first.title()} {second.title()}"
        category = _CATEGORIES[i % len(_CATEGORIES)]
        filler_a = _FILLERS[i % len(_FILLERS)]
        filler_b = _FILLERS[(i * 7 + 3) % len(_FILLERS)]
        records.append(
            LandmarkRecord(
                id=f"lm{i:03d}",
                name=name,
                point=GeoPoint(1.25 + 0.012 * (i // 10), 103.72 + 0.012 * (i % 10)),
                category=category,
                description=f"{name} is a {filler_a} {category} in the {filler_b} quarter of sector {i // 10}.",
                source="seed-gazetteer",
                credibility=0.9,
            )
        )
    records.append(
        LandmarkRecord(
            id=MBS_ID,
            name="Marina Bay Sands",
            point=GeoPoint(1.2834, 103.8607),
            category="landmark",
            description=(
                "Marina Bay Sands is an integrated resort where the Coldplay "
                "event is going to happen in Singapore."
            ),
            source="seed-gazetteer",
            credibility=0.95,
            admin_path=("sg",),
            window=MBS_WINDOW,
            event_text="Coldplay concert at the waterfront arena",
        )
    )
    records.append(
        LandmarkRecord(
            id=SG_ID,
            name="Singapore",
            point=GeoPoint(1.3521, 103.8198),
            category="city",
            description="Singapore is an island city-state in Southeast Asia.",
            source="seed-gazetteer",
            credibility=0.9,
        )
    )
    return records


def write_gazetteer_csv(records: list[LandmarkRecord], path: str | Path) -> Path:
    """Write records in the gazetteer CSV layout (with optional event columns)."""
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS + CSV_OPTIONAL_COLUMNS)
        for r in records:
            writer.writerow(
                [
                    r.id,
                    r.name,
                    repr(r.point.lat),
                    repr(r.point.lon),
                    r.category,
                    r.description,
                    r.source,
                    repr(r.credibility),
                    "|".join(r.admin_path),
                    repr(r.window.start) if r.window else "",
                    repr(r.window.end) if r.window else "",
                    r.event_text or "",
                ]
            )
    return path


def write_description_fixtures(records: list[LandmarkRecord], fixtures_dir: str | Path, count: int = 3) -> list[Path]:
    """Write fetcher fixture files for the first `count` records."""
    out_dir = Path(fixtures_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for r in records[:count]:
        path = out_dir / f"{r.id}.txt"
        path.write_text(
            f"source: fixture-notes\n{r.name} draws a steady stream of visitors year round.\n",
            encoding="utf-8",
        )
        paths.append(path)
    return paths


def write_eval_dataset(records: list[LandmarkRecord], path: str | Path, stride: int = 4) -> Path:
    """Self-retrieval eval dataset: exact-name queries for every stride-th record."""
    import json

    path = Path(path)
    lines = []
    for r in records[::stride]:
        lines.append(
            json.dumps(
                {
                    "query": r.name,
                    "truth_lat": r.point.lat,
                    "truth_lon": r.point.lon,
                    "truth_doc_ids": [r.id],
                    "reference_answer": f"{r.name}: {r.description}",
                },
                sort_keys=True,
            )
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def build_store(records: list[LandmarkRecord], config: EngineConfig = DEFAULT_CONFIG) -> HybridIndex:
    """Index the records into a fresh in-memory store."""
    store = HybridIndex(config)
    index_gazetteer(records, store, config)
    return store
