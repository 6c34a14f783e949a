"""Command-line surface.

Exit codes: 0 on success, 1 on validation errors (corpus, config, file
formats, arguments), 2 on numerical failures.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .autodiff import NonFiniteError, TensorError
from .config import load_config, TrainConfig
from .corpus import corpus_stats, dump_corpus, parse_corpus
from .gradsuite import TOLERANCE, run_gradient_suite
from .graphs import build_causal_kg, build_time_matrices, kg_to_dict, \
    time_matrices_to_dict
from .metrics import format_report
from .synth import generate_synthetic
from .training import (NumericalError, evaluate, format_ablation, load_model,
                       run_ablation, train)


def _cmd_validate(args):
    sentences = parse_corpus(args.path)
    print(f"OK: {len(sentences)} sentences")
    return 0


def _cmd_stats(args):
    sentences = parse_corpus(args.path)
    stats = corpus_stats(sentences)
    print(f"sentences: {stats.sentence_count}")
    for tag, count in sorted(stats.tag_counts.items()):
        print(f"tag {tag}: {count}")
    for rel, count in sorted(stats.relation_counts.items()):
        print(f"relation {rel}: {count}")
    return 0


def _cmd_synth(args):
    sentences = generate_synthetic(args.n, args.seed)
    dump_corpus(sentences, args.out)
    print(f"wrote {len(sentences)} sentences to {args.out}")
    return 0


def _cmd_build_kg(args):
    sentences = parse_corpus(args.train)
    kg = build_causal_kg(sentences)
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(kg_to_dict(kg), fh, indent=2)
        fh.write("\n")
    print(f"wrote {len(kg.nodes)} nodes, {len(kg.edges)} edges to {args.out}")
    return 0


def _cmd_export_matrices(args):
    sentences = parse_corpus(args.corpus)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for sentence in sentences:
        tm = build_time_matrices(sentence)
        payload = {"id": sentence.id, "tokens": sentence.tokens,
                   "matrices": time_matrices_to_dict(tm)}
        with open(out_dir / f"{sentence.id}.json", "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    print(f"wrote {len(sentences)} matrix files to {out_dir}")
    return 0


def _cmd_train(args):
    config = load_config(args.config) if args.config else TrainConfig()
    sentences = parse_corpus(args.train, max_len=config.max_len)

    def progress(epoch, loss):
        print(f"epoch {epoch:3d}  loss {loss:.6f}")

    result = train(config, sentences, embedding_path=args.embeddings,
                   checkpoint_path=args.out, progress=progress)
    note = " (early stop)" if result.stopped_early else ""
    print(f"saved checkpoint to {args.out} "
          f"after {len(result.loss_curve)} epochs{note}")
    return 0


def _cmd_eval(args):
    model, config, kg, _meta = load_model(args.ckpt,
                                          embedding_path=args.embeddings)
    sentences = parse_corpus(args.test, max_len=config.max_len)
    report = evaluate(model, sentences, kg)
    print(format_report(report))
    json_path = args.json or f"{args.ckpt}.eval.json"
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2)
        fh.write("\n")
    print(f"wrote {json_path}")
    return 0


def _cmd_ablate(args):
    config = load_config(args.config) if args.config else TrainConfig()
    sentences = parse_corpus(args.corpus, max_len=config.max_len)

    def progress(variant, epoch, loss):
        print(f"[{variant}] epoch {epoch:3d}  loss {loss:.6f}")

    results = run_ablation(config, sentences, embedding_path=args.embeddings,
                           progress=progress)
    print(format_ablation(results))
    if args.json:
        payload = {variant: report.to_dict()
                   for variant, report in results.items()}
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
        print(f"wrote {args.json}")
    return 0


def _cmd_gradcheck(args):
    checks = run_gradient_suite()
    width = max(len(name) for name in checks)
    failed = []
    for name, err in checks.items():
        status = "ok" if err < TOLERANCE else "FAIL"
        print(f"{name:<{width}}  {err:.3e}  {status}")
        if err >= TOLERANCE:
            failed.append(name)
    if failed:
        print(f"gradient check failed for: {', '.join(failed)}",
              file=sys.stderr)
        return 2
    print(f"all {len(checks)} checks below {TOLERANCE:g}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="tcgat",
        description="Temporal-causal token labeling toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate a JSONL corpus")
    p.add_argument("path")

    p = sub.add_parser("stats", help="tag and relation counts for a corpus")
    p.add_argument("path")

    p = sub.add_parser("synth", help="generate a synthetic corpus")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("build-kg", help="build the causal graph from a train split")
    p.add_argument("--train", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("export-matrices",
                       help="write per-sentence time matrices as JSON")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("train", help="train a model")
    p.add_argument("--config")
    p.add_argument("--train", required=True)
    p.add_argument("--embeddings")
    p.add_argument("--out", required=True)

    p = sub.add_parser("eval", help="evaluate a checkpoint")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--embeddings")
    p.add_argument("--json")

    p = sub.add_parser("ablate", help="train and compare all variants")
    p.add_argument("--config")
    p.add_argument("--corpus", required=True)
    p.add_argument("--embeddings")
    p.add_argument("--json")

    sub.add_parser("gradcheck", help="run the gradient check suite")

    return parser


COMMANDS = {
    "validate": _cmd_validate,
    "stats": _cmd_stats,
    "synth": _cmd_synth,
    "build-kg": _cmd_build_kg,
    "export-matrices": _cmd_export_matrices,
    "train": _cmd_train,
    "eval": _cmd_eval,
    "ablate": _cmd_ablate,
    "gradcheck": _cmd_gradcheck,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (NumericalError, NonFiniteError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except (TensorError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
