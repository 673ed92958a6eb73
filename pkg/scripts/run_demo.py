#!/usr/bin/env python3
"""End-to-end demo: build fixtures, ingest, query, relate, compute, evaluate.

Everything runs in-process against a temp directory and prints what a full
CLI session would produce. Deterministic: two runs print identical output.

Usage: python scripts/run_demo.py
"""

import json
import tempfile
from pathlib import Path

from geocontext import DEFAULT_CONFIG
from geocontext.evalkit import run_eval
from geocontext.fixtures import (
    EVENT_TIME,
    build_landmarks,
    build_store,
    write_eval_dataset,
    write_gazetteer_csv,
)
from geocontext.geocompute import Feature, FeatureSet, distance_matrix, within_radius
from geocontext.geomodel import GeoPoint
from geocontext.georelate import render_relation
from geocontext.geotext import Gazetteer
from geocontext.ragctx import answer_prompt
from geocontext.vectorstore import HybridIndex


def main() -> int:
    cfg = DEFAULT_CONFIG
    records = build_landmarks(100)
    gazetteer = Gazetteer.from_records(records)

    with tempfile.TemporaryDirectory() as tmp:
        tmp_path = Path(tmp)
        write_gazetteer_csv(records, tmp_path / "gazetteer.csv")
        store = build_store(records, cfg)
        store_path = tmp_path / "store.gcev"
        store.save(store_path)
        store = HybridIndex.load(store_path, cfg)
        print(f"indexed {len(store)} records -> {store_path.name} ({store_path.stat().st_size} bytes)")

        print("\n== retrieval query ==")
        prompt = "Where is the Coldplay event going to happen in Singapore?"
        payload = answer_prompt(store, gazetteer, prompt, k=5, config=cfg, time=EVENT_TIME)
        print(f"prompt: {prompt}")
        print(payload["response"])

        print("\n== spatial relation ==")
        by_id = {r.id: r for r in records}
        print(render_relation(by_id["sg"], by_id["mbs"], cfg).rendered)

        print("\n== geospatial computation ==")
        features = FeatureSet(features=tuple(Feature(id=r.id, geometry=r.point) for r in records[:10]))
        print(distance_matrix(features, features).summary)
        print(within_radius(features, GeoPoint(1.25, 103.72), 3000.0).summary)

        print("\n== evaluation ==")
        dataset = write_eval_dataset(records, tmp_path / "eval.jsonl", stride=4)
        report = run_eval(dataset, store, cfg, k=3, gazetteer=gazetteer)
        print(
            f"cases={report.n_cases} "
            f"p@1={report.precision_at_k[1]:.3f} p@3={report.precision_at_k[3]:.3f} "
            f"relevance={report.contextual_relevance_mean:.3f} "
            f"spatial_err_mean_m={report.spatial_accuracy_mean_m:.1f}"
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
