"""Command-line entry point: serve, convert, validate.

Exit codes: 0 success, 1 validation findings, 2 bad input, 3 I/O trouble.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .eventlog import MalformedRecordError, parse_event_log, replay_event_log
from .export import StorageError, parse_model, validate_document, write_document
from .layout import generate_plane_data
from .service import (
    DEFAULT_KEEP_ALIVE_TIMEOUT_MS,
    DEFAULT_PORT,
    RecorderService,
    ServiceConfig,
    serve_forever,
)
from .watchdog import InvalidDelayError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clickwalk",
        description="Record click sessions and turn them into GraphWalker model files.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the recording HTTP service")
    serve.add_argument("--port", type=int, default=DEFAULT_PORT)
    serve.add_argument(
        "--out-dir", type=Path, default=Path("."), help="where finished models are saved"
    )
    serve.add_argument(
        "--timeout-ms",
        type=float,
        default=DEFAULT_KEEP_ALIVE_TIMEOUT_MS,
        help="keep-alive silence that auto-finalizes a session",
    )
    serve.add_argument("--host", default="0.0.0.0")

    convert = sub.add_parser("convert", help="replay an event log into a model file")
    convert.add_argument("input", type=Path, help="newline-delimited JSON event log")
    convert.add_argument("-o", "--output", type=Path, required=True)
    convert.add_argument(
        "--timeout-ms", type=float, default=DEFAULT_KEEP_ALIVE_TIMEOUT_MS
    )

    validate = sub.add_parser("validate", help="check a model file against the schema")
    validate.add_argument("input", type=Path)

    return parser


def cmd_serve(args) -> int:
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(levelname)s %(message)s")
    try:
        config = ServiceConfig(
            port=args.port, keep_alive_timeout_ms=args.timeout_ms, out_dir=args.out_dir
        )
        service = RecorderService(config)
    except InvalidDelayError as exc:
        print(f"clickwalk: {exc}", file=sys.stderr)
        return 2
    try:
        args.out_dir.mkdir(parents=True, exist_ok=True)
        serve_forever(service, host=args.host)
    except OSError as exc:
        print(f"clickwalk: cannot serve on port {args.port}: {exc}", file=sys.stderr)
        return 3
    return 0


def cmd_convert(args) -> int:
    try:
        text = args.input.read_text(encoding="utf-8")
    except OSError as exc:
        print(f"clickwalk: cannot read {args.input}: {exc}", file=sys.stderr)
        return 3
    try:
        records = parse_event_log(text)
    except MalformedRecordError as exc:
        print(f"clickwalk: {args.input}: {exc}", file=sys.stderr)
        return 2
    if args.timeout_ms <= 0:
        print("clickwalk: --timeout-ms must be greater than 0", file=sys.stderr)
        return 2
    model = replay_event_log(records, keep_alive_timeout_ms=args.timeout_ms)
    generate_plane_data(model)
    document = parse_model(model)
    try:
        write_document(document, args.output)
    except StorageError as exc:
        print(f"clickwalk: {exc}", file=sys.stderr)
        return 3
    return 0


def cmd_validate(args) -> int:
    try:
        text = args.input.read_text(encoding="utf-8")
    except OSError as exc:
        print(f"clickwalk: cannot read {args.input}: {exc}", file=sys.stderr)
        return 3
    report = validate_document(text)
    for violation in report.violations:
        print(violation)
    if report.is_valid:
        print(f"{args.input}: OK")
        return 0
    print(f"{args.input}: {len(report.violations)} violation(s)", file=sys.stderr)
    return 1


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        return cmd_serve(args)
    if args.command == "convert":
        return cmd_convert(args)
    return cmd_validate(args)


if __name__ == "__main__":
    sys.exit(main())
