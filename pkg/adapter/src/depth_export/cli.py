"""Standalone export script; flags mirror ExportConfig."""

from __future__ import annotations

import argparse
import logging
import sys

from .formats import FORMATS
from .runner import CONVERSIONS, ExportConfig, ExportError, export_run


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="depth-export",
        description="Run a depth model over a benchmark manifest (clean and "
                    "corrupted trees) and export predictions in the harness "
                    "exchange format.")
    parser.add_argument("--manifest", required=True)
    parser.add_argument("--out", required=True, dest="output_root")
    parser.add_argument("--corrupted-root", default=None)
    parser.add_argument("--model", required=True,
                        help="import path pkg.module:callable, or a command "
                             "template containing {batch}")
    parser.add_argument("--format", default="png16", choices=FORMATS)
    parser.add_argument("--conversion", default="depth", choices=CONVERSIONS)
    parser.add_argument("--conversion-scale", default=1.0, type=float)
    parser.add_argument("--batch-size", default=8, type=int)
    parser.add_argument("--device", default="cpu")
    parser.add_argument("--types", default=None,
                        help="comma-separated corruption types (default: all "
                             "directories under the corrupted root)")
    parser.add_argument("--severities", default="1,2,3,4,5")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        config = ExportConfig(
            manifest=args.manifest,
            output_root=args.output_root,
            corrupted_root=args.corrupted_root,
            model=args.model,
            fmt=args.format,
            conversion=args.conversion,
            conversion_scale=args.conversion_scale,
            batch_size=args.batch_size,
            device=args.device,
            types=tuple(args.types.split(",")) if args.types else None,
            severities=tuple(int(s) for s in args.severities.split(",")),
        )
        report = export_run(config)
    except ExportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"{report.succeeded}/{report.attempted} predictions written "
          f"({len(report.failures)} failures)")
    for key, reason in report.failures[:20]:
        print(f"  failed {key}: {reason}", file=sys.stderr)
    return 0 if report.ok() else 1


if __name__ == "__main__":
    raise SystemExit(main())
