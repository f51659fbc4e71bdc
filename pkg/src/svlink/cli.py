"""Operator command line: validate, process, serve, search, eval.

Exit codes: 0 success, 1 domain failure (validation findings, corrupt
data, failed metrics preconditions), 2 I/O or usage errors (missing
files, bad flags, unbindable address).
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

from .config import ConfigError, ServiceConfig, load_config
from .corpus import CorpusBundle, DuplicateId, MalformedRecord, MissingFile, load_corpus, validate_links
from .evaluate import GoldMissing, evaluate_bundle
from .pipeline import ValidationFailed, run_pipeline, search_payload
from .searchidx import InvalidQuery, Query, SearchIndex, SnapshotCorrupt

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_IO = 2

log = logging.getLogger("svlink")


def _fail(message: str, code: int) -> int:
    print(message, file=sys.stderr)
    return code


def _load_bundle(root: Path) -> "CorpusBundle | int":
    """Load a corpus, or return the exit code for the failure."""
    try:
        return load_corpus(root)
    except MissingFile as exc:
        return _fail(str(exc), EXIT_IO)
    except (MalformedRecord, DuplicateId) as exc:
        return _fail(str(exc), EXIT_DOMAIN)
    except OSError as exc:
        return _fail(str(exc), EXIT_IO)


def cmd_validate(args, cfg: ServiceConfig) -> int:
    root = Path(args.corpus_root) if args.corpus_root else cfg.corpus_root
    bundle = _load_bundle(root)
    if isinstance(bundle, int):
        return bundle
    report = validate_links(bundle)
    for finding in report.findings:
        print(f"{finding.kind}: {finding.source_kind} {finding.source_id} -> {finding.ref}")
    if report.ok:
        print(
            f"ok: {len(bundle.publications)} publications, "
            f"{len(bundle.datasets)} datasets, {len(bundle.variables)} variables"
        )
        return EXIT_OK
    print(f"{len(report.findings)} findings", file=sys.stderr)
    return EXIT_DOMAIN


def cmd_process(args, cfg: ServiceConfig) -> int:
    root = Path(args.corpus_root) if args.corpus_root else cfg.corpus_root
    bundle = _load_bundle(root)
    if isinstance(bundle, int):
        return bundle
    if args.workers is not None:
        cfg = dataclasses.replace(cfg, worker_count=args.workers)
    if args.no_backend:
        cfg = dataclasses.replace(cfg, backend=dataclasses.replace(cfg.backend, endpoint_url=None))
    elif args.backend_url:
        cfg = dataclasses.replace(
            cfg, backend=dataclasses.replace(cfg.backend, endpoint_url=args.backend_url)
        )
    try:
        report, index = run_pipeline(bundle, cfg)
    except ValidationFailed as exc:
        return _fail(str(exc), EXIT_DOMAIN)
    snapshot_path = Path(args.snapshot_out) if args.snapshot_out else cfg.snapshot_path
    try:
        index.save_snapshot(snapshot_path)
    except OSError as exc:
        return _fail(f"cannot write snapshot: {exc}", EXIT_IO)
    payload = dict(report.to_dict())
    payload["state_hash"] = index.state_hash()
    payload["snapshot_path"] = str(snapshot_path)
    print(json.dumps(payload, sort_keys=True, ensure_ascii=False))
    return EXIT_OK


def cmd_serve(args, cfg: ServiceConfig) -> int:
    from .corpus import CorpusError
    from .service import BindError, serve

    try:
        serve(cfg)
    except BindError as exc:
        return _fail(str(exc), EXIT_IO)
    except SnapshotCorrupt as exc:
        return _fail(str(exc), EXIT_DOMAIN)
    except MissingFile as exc:
        return _fail(str(exc), EXIT_IO)
    except (CorpusError, ValidationFailed) as exc:
        return _fail(str(exc), EXIT_DOMAIN)
    return EXIT_OK


def cmd_search(args, cfg: ServiceConfig) -> int:
    snapshot_path = Path(args.snapshot) if args.snapshot else cfg.snapshot_path
    try:
        index = SearchIndex.load_snapshot(snapshot_path)
    except SnapshotCorrupt as exc:
        return _fail(str(exc), EXIT_DOMAIN)
    except OSError as exc:
        return _fail(str(exc), EXIT_IO)
    query = Query(
        text=args.query or "",
        language=args.lang,
        year_min=args.year_min,
        year_max=args.year_max,
        sort=args.sort,
        page=args.page,
        page_size=args.page_size,
    )
    try:
        payload = search_payload(index, query)
    except InvalidQuery as exc:
        return _fail(str(exc), EXIT_IO)
    if args.json:
        print(json.dumps(payload, sort_keys=True, ensure_ascii=False))
        return EXIT_OK
    print(f"total: {payload['total']}")
    for hit in payload["hits"]:
        print(
            f"{hit['publication_id']}  score={hit['score']:.4f}  year={hit['year']}  "
            f"variables={hit['variable_count']}  {hit['title']}"
        )
        if hit["snippet"]:
            print(f"    {hit['snippet']}")
    return EXIT_OK


def cmd_eval(args, cfg: ServiceConfig) -> int:
    root = Path(args.corpus_root) if args.corpus_root else cfg.corpus_root
    bundle = _load_bundle(root)
    if isinstance(bundle, int):
        return bundle
    try:
        result = evaluate_bundle(bundle, cfg.sv)
    except GoldMissing as exc:
        return _fail(str(exc), EXIT_DOMAIN)
    print(json.dumps(result.to_dict(), sort_keys=True, ensure_ascii=False))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="svlink",
        description="Link survey variables to publications and search the results.",
    )
    parser.add_argument("--config", help="path to a key=value config file")
    parser.add_argument(
        "--log-level",
        default="warning",
        choices=["debug", "info", "warning", "error"],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="check corpus referential integrity")
    p_validate.add_argument("corpus_root", nargs="?", help="corpus directory (default from config)")
    p_validate.set_defaults(func=cmd_validate)

    p_process = sub.add_parser("process", help="run the full pipeline and write a snapshot")
    p_process.add_argument("corpus_root", nargs="?")
    p_process.add_argument("--snapshot-out", help="snapshot path (default from config)")
    p_process.add_argument("--workers", type=int)
    p_process.add_argument(
        "--no-backend", action="store_true", help="force the no-backend fallback policy"
    )
    p_process.add_argument("--backend-url", help="abstractive backend endpoint")
    p_process.set_defaults(func=cmd_process)

    p_serve = sub.add_parser("serve", help="run the REST service")
    p_serve.set_defaults(func=cmd_serve)

    p_search = sub.add_parser("search", help="query a snapshot")
    p_search.add_argument("query", nargs="?", default="", help="query text (empty lists all)")
    p_search.add_argument("--snapshot", help="snapshot path (default from config)")
    p_search.add_argument(
        "--sort", default="relevance", choices=["relevance", "recency", "variable_count"]
    )
    p_search.add_argument("--lang")
    p_search.add_argument("--year-min", type=int)
    p_search.add_argument("--year-max", type=int)
    p_search.add_argument("--page", type=int, default=0)
    p_search.add_argument("--page-size", type=int, default=10)
    p_search.add_argument("--json", action="store_true", help="print the raw search payload")
    p_search.set_defaults(func=cmd_search)

    p_eval = sub.add_parser("eval", help="score identification against gold links")
    p_eval.add_argument("corpus_root", nargs="?")
    p_eval.set_defaults(func=cmd_eval)

    return parser


def main(argv: "list[str] | None" = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=args.log_level.upper(), format="%(levelname)s %(name)s: %(message)s"
    )
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        return _fail(f"config error: {exc}", EXIT_IO)
    return args.func(args, cfg)


if __name__ == "__main__":
    raise SystemExit(main())
