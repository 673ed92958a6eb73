#!/usr/bin/env python3
"""Generate the synthetic demo fixtures into a directory.

Writes:
  gazetteer.csv        100-landmark gazetteer (incl. the Marina Bay Sands
                       event record and the Singapore city anchor)
  descriptions/        fetcher fixture files for the first few landmarks
  eval.jsonl           self-retrieval evaluation dataset
  engine.cfg           the default engine configuration, ready to edit

Usage: python scripts/make_fixtures.py [--out DIR] [--n 100]
"""

import argparse
from pathlib import Path

from geocontext.config import DEFAULT_CONFIG, dump_config
from geocontext.fixtures import (
    build_landmarks,
    write_description_fixtures,
    write_eval_dataset,
    write_gazetteer_csv,
)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="demo_fixtures", help="output directory")
    parser.add_argument("--n", type=int, default=100, help="number of landmarks")
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    records = build_landmarks(args.n)
    gaz = write_gazetteer_csv(records, out / "gazetteer.csv")
    fixtures = write_description_fixtures(records, out / "descriptions", count=3)
    dataset = write_eval_dataset(records, out / "eval.jsonl", stride=4)
    cfg = out / "engine.cfg"
    cfg.write_text(dump_config(DEFAULT_CONFIG), encoding="utf-8")

    print(f"wrote {gaz} ({len(records)} records)")
    print(f"wrote {len(fixtures)} description fixtures under {out / 'descriptions'}")
    print(f"wrote {dataset}")
    print(f"wrote {cfg}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
