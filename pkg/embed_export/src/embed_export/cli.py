"""CLI for the vectors exporter."""

from __future__ import annotations

import argparse
import sys

from .errors import ExportError
from .exporter import ExportConfig, export_token_vectors


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="embed-export",
        description="Export per-token contextual vectors into an RPPV1 file.",
    )
    parser.add_argument("--model", required=True, help="model identifier or checkpoint dir")
    parser.add_argument("--corpus", required=True, help="tokenized corpus, one sentence per line")
    parser.add_argument("--out", required=True, help="RPPV1 output path")
    parser.add_argument("--layer", type=int, default=-1,
                        help="hidden-state layer to export (default: -1, the last)")
    parser.add_argument("--batch-size", type=int, default=8, help="sentences per batch")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = ExportConfig(
        model=args.model,
        corpus=args.corpus,
        output=args.out,
        layer=args.layer,
        batch_size=args.batch_size,
    )
    try:
        count = export_token_vectors(cfg)
    except ExportError as exc:
        print(f"ERROR {exc.code}: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"ERROR {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {count} sentences to {cfg.output}")
    return 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
