"""Command line entry points for the model adapter.

Two one-shot batch commands, mirroring the ranking pipeline's path
conventions:

    vcadapter extract-contexts --images DIR --captions CAPS.json \
        --classifiers colorname,luminance --out corpus.jsonl
    vcadapter embed-texts --texts texts.txt --encoder hashed-bow \
        --out embeddings.jsonl
"""

from __future__ import annotations

import argparse
import json
import sys

from .classifiers import ModelUnavailableError, make_classifier
from .encoders import make_encoder
from .export import embed_texts, extract_contexts, warn_skipped, write_jsonl


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vcadapter",
        description="Export classifier contexts and sentence embeddings "
        "as JSONL for the caption ranking pipeline.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "extract-contexts", help="classify images and emit corpus rows"
    )
    p.add_argument("--images", required=True, help="directory of image files")
    p.add_argument(
        "--captions",
        required=True,
        help="JSON file mapping image id (filename stem) to caption list",
    )
    p.add_argument(
        "--classifiers",
        default="colorname,luminance",
        help="comma-separated classifier names "
        "(colorname, luminance, resnet152, clip)",
    )
    p.add_argument("--out", required=True, help="output corpus JSONL path")

    p = sub.add_parser("embed-texts", help="encode texts and emit embedding rows")
    p.add_argument(
        "--texts", required=True, help="file with one input text per line"
    )
    p.add_argument(
        "--encoder", default="hashed-bow", help="encoder name (hashed-bow, sbert)"
    )
    p.add_argument("--dim", type=int, default=256, help="hashed-bow dimension")
    p.add_argument("--seed", type=int, default=0, help="hashed-bow seed")
    p.add_argument("--out", required=True, help="output embeddings JSONL path")
    return parser


def cmd_extract_contexts(args) -> int:
    with open(args.captions, encoding="utf-8") as fh:
        captions = json.load(fh)
    classifiers = [make_classifier(n.strip()) for n in args.classifiers.split(",") if n.strip()]
    report = extract_contexts(args.images, classifiers, captions)
    warn_skipped(report)
    write_jsonl(report.rows, args.out)
    print(f"wrote {len(report.rows)} corpus rows -> {args.out}")
    return 0


def cmd_embed_texts(args) -> int:
    with open(args.texts, encoding="utf-8") as fh:
        texts = [line.rstrip("\n") for line in fh if line.strip()]
    encoder = make_encoder(args.encoder, dim=args.dim, seed=args.seed)
    rows = embed_texts(texts, encoder)
    write_jsonl(rows, args.out)
    print(f"wrote {len(rows)} embedding rows -> {args.out}")
    return 0


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "extract-contexts":
            return cmd_extract_contexts(args)
        return cmd_embed_texts(args)
    except (ValueError, ModelUnavailableError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
