"""Batch export: images -> corpus.jsonl rows, texts -> embeddings.jsonl rows.

The adapter communicates with the ranking pipeline exclusively through
files, so everything here produces plain dict rows matching the pipeline's
JSONL schemas and a writer that serializes them deterministically.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from PIL import Image, UnidentifiedImageError

IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg", ".bmp", ".gif", ".webp"}


@dataclass
class ExtractReport:
    """What an extraction run produced and what it skipped."""

    rows: list = field(default_factory=list)
    skipped: list = field(default_factory=list)  # (path, reason)


def list_images(image_dir) -> list[Path]:
    """Image files under a directory, sorted by name for determinism."""
    root = Path(image_dir)
    if not root.is_dir():
        raise ValueError(f"not a directory: {image_dir}")
    return sorted(
        p for p in root.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES and p.is_file()
    )


def extract_contexts(image_dir, classifiers, captions) -> ExtractReport:
    """Run every classifier over every image in a directory.

    ``captions`` maps image id (the filename stem) to that image's human
    captions; images without captions are skipped, since a corpus row
    without captions is not loadable downstream. Unreadable images are
    skipped with a recorded reason rather than aborting the batch.
    """
    if not classifiers:
        raise ValueError("need at least one classifier")
    report = ExtractReport()
    for path in list_images(image_dir):
        image_id = path.stem
        caps = captions.get(image_id)
        if not caps:
            report.skipped.append((str(path), "no captions for image id"))
            continue
        try:
            with Image.open(path) as img:
                img.load()
                contexts = [
                    {"label": label, "confidence": conf, "source": clf.source}
                    for clf in classifiers
                    for label, conf in clf.classify(img)
                ]
        except (OSError, UnidentifiedImageError) as exc:
            report.skipped.append((str(path), str(exc)))
            continue
        report.rows.append(
            {"image_id": image_id, "captions": list(caps), "contexts": contexts}
        )
    return report


def embed_texts(texts, encoder) -> list[dict]:
    """One embedding row per unique text, keyed by the exact text.

    Duplicates collapse to a single row; first-seen order is kept so the
    output is stable across runs.
    """
    unique = list(dict.fromkeys(texts))
    if not unique:
        raise ValueError("texts must be nonempty")
    vectors = encoder.encode(unique)
    return [
        {"key": text, "vector": [float(v) for v in vec]}
        for text, vec in zip(unique, vectors)
    ]


def write_jsonl(rows, path) -> None:
    """Serialize rows one JSON object per line, keys sorted."""
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True, ensure_ascii=False) + "\n")


def warn_skipped(report: ExtractReport, stream=None) -> None:
    for path, reason in report.skipped:
        print(f"warning: skipped {path}: {reason}", file=stream or sys.stderr)
