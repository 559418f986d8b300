"""Sidecar command line: ``embed`` and ``finetune``."""

from __future__ import annotations

import argparse
import sys

from .embed import DEFAULT_MODEL as EMBED_MODEL
from .embed import EmbedJob, embed_corpus
from .finetune import DEFAULT_MODEL as CLASSIFIER_MODEL
from .finetune import FinetuneJob, finetune_classifier


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="corpusembedder",
        description="produce embeddings and classifier probabilities for the pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    embed = sub.add_parser("embed", help="embed title+abstract of every paper")
    embed.add_argument("--corpus", required=True)
    embed.add_argument("--model", default=EMBED_MODEL,
                       help="sentence-embedding model name or local path")
    embed.add_argument("--out", required=True)
    embed.add_argument("--batch", type=int, default=32)

    tune = sub.add_parser("finetune", help="fine-tune a classifier on labeled sets")
    tune.add_argument("--train", required=True, help="labeled-set export (train split)")
    tune.add_argument("--val", required=True, help="labeled-set export (validation split)")
    tune.add_argument("--corpus", required=True)
    tune.add_argument("--out", required=True, help="probability file to write")
    tune.add_argument("--model", default=CLASSIFIER_MODEL)
    tune.add_argument("--epochs", type=int, default=1)
    tune.add_argument("--batch", type=int, default=8)
    tune.add_argument("--lr", type=float, default=2e-5)
    tune.add_argument("--max-length", type=int, default=128)
    tune.add_argument("--seed", type=int, default=0)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "embed":
            count = embed_corpus(
                EmbedJob(
                    corpus_path=args.corpus,
                    out_path=args.out,
                    model=args.model,
                    batch_size=args.batch,
                )
            )
            print(f"embed: wrote {count} vectors to {args.out}")
        else:
            probs = finetune_classifier(
                FinetuneJob(
                    train_path=args.train,
                    val_path=args.val,
                    corpus_path=args.corpus,
                    out_path=args.out,
                    model=args.model,
                    epochs=args.epochs,
                    batch_size=args.batch,
                    learning_rate=args.lr,
                    max_length=args.max_length,
                    seed=args.seed,
                )
            )
            print(f"finetune: wrote {len(probs)} probabilities to {args.out}")
    except (RuntimeError, ValueError, FileNotFoundError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
