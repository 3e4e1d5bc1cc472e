"""Command-line entry point.

Exit codes: 0 success, 1 domain errors (not found, parse failures, aborted
fetches), 2 usage errors. Results go to stdout in the requested format;
diagnostics go to stderr.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .errors import RecsysError
from .evaluate import cross_evaluate, export_frame, summary_stats
from .indexing import RecommenderIndex, load_index, save_index
from .ingest import (
    FORMAT_ERC721,
    FORMATS,
    FetchConfig,
    SnapshotStore,
    fetch_assets,
    load_collection,
    write_collection_json,
)
from .model import SCOPES, parse_token_ref
from .recommend import MODELS, recommend, recommendation_payload
from .serialize import render_json

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="recsys",
        description="Trait-based NFT recommendations: content similarity and rarity proximity.",
    )
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="increase stderr logging"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fetch", help="download a collection from an assets API")
    p.add_argument("--api-base", required=True, help="assets endpoint URL")
    p.add_argument("--contract", required=True, help="collection contract address")
    p.add_argument("--out", required=True, help="output directory (snapshots + collection.json)")
    p.add_argument("--page-size", type=int, default=50)
    p.add_argument("--rate", type=float, default=2.0, help="max requests per second")
    p.add_argument("--max-retries", type=int, default=5)
    p.set_defaults(func=cmd_fetch)

    p = sub.add_parser("ingest", help="load a local collection file")
    p.add_argument("--input", required=True, help="collection file path")
    p.add_argument("--format", required=True, choices=FORMATS)
    p.add_argument("--out", required=True, help="output directory for collection.json")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("index", help="build the on-disk query index")
    p.add_argument("--collection", required=True, help="collection directory or file")
    p.add_argument("--out", required=True, help="index directory to create")
    p.add_argument("--scope", choices=SCOPES, default="local")
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("recommend", help="query top-k recommendations")
    p.add_argument("--index", required=True, help="index directory")
    p.add_argument("--ref", required=True, help="reference token as <contract>-<id>")
    p.add_argument("--model", choices=MODELS, default="both")
    p.add_argument("-k", type=int, default=10)
    p.add_argument("--format", choices=("json", "table"), default="json")
    p.set_defaults(func=cmd_recommend)

    p = sub.add_parser("evaluate", help="export the dual-metric evaluation frame")
    p.add_argument("--index", required=True)
    p.add_argument("--ref", required=True)
    p.add_argument("-k", type=int, default=10)
    p.add_argument("--out", required=True, help="destination file")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("serve", help="serve the read-only HTTP API")
    p.add_argument("--index", required=True)
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--static", default=None, help="directory with the built explorer UI")
    p.set_defaults(func=cmd_serve)

    return parser


def cmd_fetch(args) -> int:
    cfg = FetchConfig(
        api_base=args.api_base,
        contract=args.contract,
        page_size=args.page_size,
        rate_limit=args.rate,
        max_retries=args.max_retries,
    )
    out = Path(args.out)
    store = SnapshotStore(out)
    collection = fetch_assets(cfg, store)
    out.mkdir(parents=True, exist_ok=True)
    write_collection_json(collection, out / "collection.json")
    sys.stdout.write(
        render_json({"tokens": len(collection), "pages": store.last_page() + 1})
    )
    return 0


def cmd_ingest(args) -> int:
    collection = load_collection(args.input, args.format)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_collection_json(collection, out / "collection.json")
    sys.stdout.write(render_json({"tokens": len(collection)}))
    return 0


def _load_collection_arg(path_text: str):
    path = Path(path_text)
    if path.is_dir():
        path = path / "collection.json"
    return load_collection(path, FORMAT_ERC721)


def cmd_index(args) -> int:
    collection = _load_collection_arg(args.collection)
    index = RecommenderIndex(scope=args.scope).fit(collection)
    save_index(index, args.out)
    sys.stdout.write(
        render_json({"tokens": len(collection), "vocabulary": len(index.vocabulary_)})
    )
    return 0


def _format_table(payload: dict) -> str:
    def section(rows: list[dict]) -> list[str]:
        id_width = max([len(r["id"]) for r in rows] + [len("id")])
        lines = [f"{'rank':>4}  {'id':<{id_width}}  score"]
        for r in rows:
            lines.append(f"{r['rank']:>4}  {r['id']:<{id_width}}  {r['score']:.12g}")
        return lines

    lines = [f"reference: {payload['reference']}  k: {payload['k']}"]
    if payload["model"] == "both":
        for name in ("traits", "rarity"):
            lines.append(f"model: {name}")
            lines.extend(section(payload["results"][name]))
    else:
        lines.append(f"model: {payload['model']}")
        lines.extend(section(payload["results"]))
    return "\n".join(lines) + "\n"


def cmd_recommend(args) -> int:
    index = load_index(args.index)
    ref = parse_token_ref(args.ref)
    results = recommend(ref, args.model, args.k, index)
    payload = recommendation_payload(ref, args.model, args.k, results)
    if args.format == "json":
        sys.stdout.write(render_json(payload))
    else:
        sys.stdout.write(_format_table(payload))
    return 0


def cmd_evaluate(args) -> int:
    index = load_index(args.index)
    ref = parse_token_ref(args.ref)
    frame = cross_evaluate(ref, args.k, index)
    export_frame(frame, args.format, args.out)
    logger.info("wrote %s frame to %s", args.format, args.out)
    sys.stdout.write(render_json(summary_stats(frame)))
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    index = load_index(args.index)
    app = create_app(index, static_dir=args.static)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2

    level = logging.WARNING
    if args.verbose == 1:
        level = logging.INFO
    elif args.verbose >= 2:
        level = logging.DEBUG
    logging.basicConfig(stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s")

    try:
        return args.func(args)
    except RecsysError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
