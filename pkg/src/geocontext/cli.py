"""Command-line front door.

Subcommands: tokenize, ingest, query, compute, eval, serve. Exit codes:
0 success, 1 usage error, 2 data error (printed to stderr with a
machine-parsable "error_code=" prefix). All primary outputs are reproducible
for identical inputs and config.
"""

from __future__ import annotations

import argparse
import json
import sys

from .config import DEFAULT_CONFIG, load_config
from .errors import GeoContextError
from .geocompute import distance_matrix, load_geo_file, nearest_join, within_radius, write_result
from .geotext import Gazetteer, SubwordModel, ngram_tokenize, semantic_tag, subword_encode, text_to_coord
from .ingest import FixtureFetcher, index_descriptions, index_gazetteer, load_gazetteer, quality_filter
from .ragctx import answer_prompt, payload_json
from .evalkit import run_eval, write_report
from .server import make_server
from .vectorstore import HybridIndex


def _load_cfg(args):
    return load_config(args.config) if args.config else DEFAULT_CONFIG


def _load_gazetteer_index(path: str | None) -> Gazetteer:
    if not path:
        return Gazetteer()
    records, _ = load_gazetteer(path)
    return Gazetteer.from_records(records)


def cmd_tokenize(args) -> int:
    if args.scheme == "ngram":
        tokens = ngram_tokenize(args.text, args.n)
    elif args.scheme == "subword":
        if not args.model:
            raise GeoContextError("subword scheme requires --model")
        tokens = subword_encode(SubwordModel.load(args.model), args.text)
    else:
        tokens = semantic_tag(args.text, _load_gazetteer_index(args.gazetteer))
    for token in tokens:
        print(f"{token.kind}\t{token.span[0]}:{token.span[1]}\t{token.text}")
    return 0


def cmd_ingest(args) -> int:
    config = _load_cfg(args)
    records, diagnostics = load_gazetteer(args.gazetteer, strict=args.strict)
    for note in diagnostics:
        print(f"warning: {note}", file=sys.stderr)
    store = HybridIndex(config)
    indexed = index_gazetteer(records, store, config)
    if args.fixtures:
        fetcher = FixtureFetcher(args.fixtures)
        for record in records:
            kept, _ = quality_filter(fetcher.fetch(record), config)
            indexed += index_descriptions(record, kept, store, config)
    store.save(args.store)
    print(f"indexed={indexed} store_records={len(store)}")
    return 0


def cmd_query(args) -> int:
    config = _load_cfg(args)
    store = HybridIndex.load(args.store, config)
    gazetteer = _load_gazetteer_index(args.gazetteer)
    payload = answer_prompt(store, gazetteer, args.prompt, args.k, config, time=args.time)
    if args.json:
        print(payload_json(payload))
    else:
        print(payload["response"])
        if payload["citations"]:
            print()
            for c in payload["citations"]:
                print(f"citation: {c['doc_id']} | {c['source']}")
    return 0


def cmd_compute(args) -> int:
    a = load_geo_file(args.a)
    if args.op == "distance-matrix":
        if not args.b:
            raise GeoContextError("distance-matrix requires --b")
        result = distance_matrix(a, load_geo_file(args.b))
    elif args.op == "nearest-join":
        if not args.b:
            raise GeoContextError("nearest-join requires --b")
        result = nearest_join(a, load_geo_file(args.b))
    else:
        if not args.center or args.radius_m is None:
            raise GeoContextError("within-radius requires --center and --radius-m")
        result = within_radius(a, text_to_coord(args.center), args.radius_m)
    write_result(result, args.out)
    print(result.summary)
    return 0


def cmd_eval(args) -> int:
    config = _load_cfg(args)
    store = HybridIndex.load(args.store, config)
    gazetteer = _load_gazetteer_index(args.gazetteer)
    report = run_eval(
        args.dataset, store, config, k=args.k, gazetteer=gazetteer,
        strict=args.strict, radius_m=args.radius_m,
    )
    json_path, txt_path = write_report(report, args.out)
    print(f"report: {json_path} {txt_path}")
    print(
        f"cases={report.n_cases} "
        f"p@1={report.precision_at_k.get(1)} "
        f"relevance={report.contextual_relevance_mean}"
    )
    return 0


def cmd_serve(args) -> int:
    config = _load_cfg(args)
    store = HybridIndex.load(args.store, config)
    gazetteer = _load_gazetteer_index(args.gazetteer)
    host, _, port = args.bind.partition(":")
    server = make_server(store, gazetteer, config, host=host or "127.0.0.1", port=int(port or 0))
    print(f"serving on {server.server_address[0]}:{server.server_address[1]} records={len(store)}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


class _Parser(argparse.ArgumentParser):
    """argparse defaults usage failures to exit 2; the CLI contract is 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gce", description="GeoContext engine CLI")
    parser.add_argument("--config", help="path to a key = value config file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tokenize", parents=[], help="tokenize text")
    p.add_argument("text")
    p.add_argument("--scheme", choices=("ngram", "subword", "semantic"), default="ngram")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--model", help="subword model JSON path")
    p.add_argument("--gazetteer", help="gazetteer CSV for semantic tagging")
    p.set_defaults(func=cmd_tokenize)

    p = sub.add_parser("ingest", help="index a gazetteer CSV into a store file")
    p.add_argument("--gazetteer", required=True)
    p.add_argument("--fixtures", help="description fixtures directory")
    p.add_argument("--store", required=True)
    p.add_argument("--strict", action="store_true")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("query", help="answer a prompt against a store")
    p.add_argument("--store", required=True)
    p.add_argument("--prompt", required=True)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--json", action="store_true")
    p.add_argument("--gazetteer", help="gazetteer CSV for place anchoring")
    p.add_argument("--time", type=float, help="query time as UTC epoch seconds")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("compute", help="run a geospatial computation over files")
    p.add_argument("--op", choices=("distance-matrix", "nearest-join", "within-radius"), required=True)
    p.add_argument("--a", required=True)
    p.add_argument("--b")
    p.add_argument("--center", help='center as "lat,lon"')
    p.add_argument("--radius-m", type=float, dest="radius_m")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("eval", help="run the evaluation harness")
    p.add_argument("--store", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--out", required=True)
    p.add_argument("--gazetteer")
    p.add_argument("--strict", action="store_true")
    p.add_argument("--radius-m", type=float, dest="radius_m",
                   help="hit when a top-k record point falls within this radius of the truth point")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("serve", help="run the HTTP query service")
    p.add_argument("--store", required=True)
    p.add_argument("--bind", default="127.0.0.1:8080")
    p.add_argument("--gazetteer")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (GeoContextError, OSError) as exc:
        print(f"error_code={type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
