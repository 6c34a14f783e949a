"""Command line entry point: corpus in, embedding file plus manifest out."""

from __future__ import annotations

import argparse
import sys

from .align import AlignmentPolicy
from .encoder import get_encoder
from .export import ExportError, export


def build_parser():
    parser = argparse.ArgumentParser(
        prog="tcgat-export",
        description="Export per-token contextual vectors for a JSONL corpus")
    parser.add_argument("--corpus", required=True)
    parser.add_argument("--out", required=True)
    parser.add_argument("--policy", choices=("mean", "first"), default="mean",
                        help="subword alignment: mean of pieces or first piece")
    parser.add_argument("--model", default="hash",
                        help="encoder backend: 'hash' (deterministic, offline) "
                             "or a pretrained model name")
    parser.add_argument("--revision", default="main",
                        help="model revision pin (pretrained backends only)")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    policy = AlignmentPolicy.from_flag(args.policy)
    try:
        encoder = get_encoder(args.model, args.revision)
        report = export(args.corpus, args.out, policy, encoder)
    except (ExportError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {report.written} sentences to {report.out_path} "
          f"(dim {encoder.dim}, {policy.strategy})")
    print(f"manifest: {report.manifest_path}")
    if report.skipped:
        print(f"skipped {len(report.skipped)} sentences (tokenization "
              f"failed): {', '.join(report.skipped)}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
