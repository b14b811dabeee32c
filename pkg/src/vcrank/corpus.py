"""Data model and JSONL I/O for every pipeline artifact.

All interchange files are JSONL: one UTF-8 JSON object per line. Loaders
validate every invariant and report violations with the 1-based line
number; loading preserves input order.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

KNOWN_SOURCES = {"resnet152", "clip", "frcnn"}


class SchemaError(ValueError):
    """A record violated the file schema or a domain invariant."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


@dataclass(frozen=True)
class Detection:
    """One detected object label with its classifier confidence."""

    label: str
    confidence: float
    source: str = "other"

    def __post_init__(self):
        if not self.label.strip():
            raise SchemaError("detection label must be nonempty")
        if not 0.0 <= self.confidence <= 1.0:
            raise SchemaError(
                f"confidence {self.confidence} outside [0, 1] for label {self.label!r}"
            )


@dataclass(frozen=True)
class ImageRecord:
    """One image's human captions plus its detected visual contexts."""

    image_id: str
    human_captions: tuple[str, ...]
    detections: tuple[Detection, ...] = ()

    def __post_init__(self):
        if len(self.human_captions) < 1:
            raise SchemaError(f"image {self.image_id!r} has no captions")
        for cap in self.human_captions:
            if not cap.strip():
                raise SchemaError(f"image {self.image_id!r} has an empty caption")


@dataclass(frozen=True)
class CandidateCaption:
    """A beam-search caption with the generator's score and rank."""

    text: str
    baseline_score: float
    original_rank: int


@dataclass(frozen=True)
class CandidateSet:
    """All beam candidates proposed for one image."""

    image_id: str
    candidates: tuple[CandidateCaption, ...]

    def __post_init__(self):
        if len(self.candidates) < 1:
            raise SchemaError(f"candidate set {self.image_id!r} is empty")
        ranks = sorted(c.original_rank for c in self.candidates)
        if ranks != list(range(len(self.candidates))):
            raise SchemaError(
                f"candidate set {self.image_id!r} ranks are not contiguous 0..k-1"
            )


@dataclass
class EmbeddingTable:
    """Text key -> unit vector map; the only bridge to any encoder."""

    dim: int
    entries: dict[str, tuple[float, ...]] = field(default_factory=dict)

    def __getitem__(self, key: str) -> tuple[float, ...]:
        try:
            return self.entries[key]
        except KeyError:
            raise KeyError(f"no embedding for key {key!r}") from None

    def __contains__(self, key: str) -> bool:
        return key in self.entries


@dataclass(frozen=True)
class RelatednessRecord:
    """One (caption, visual context) pair with its soft and hard label."""

    caption: str
    context: str
    cosine: float
    label: int
    threshold: float


def _read_jsonl(path):
    """Yield (line_number, parsed object) pairs, skipping blank lines."""
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            raw = raw.strip()
            if not raw:
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"invalid JSON: {exc}", lineno) from None
            if not isinstance(obj, dict):
                raise SchemaError("each line must be a JSON object", lineno)
            yield lineno, obj


def _require(obj: dict, key: str, typ, lineno: int):
    if key not in obj:
        raise SchemaError(f"missing field {key!r}", lineno)
    value = obj[key]
    if typ is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, typ):
        raise SchemaError(f"field {key!r} has wrong type {type(value).__name__}", lineno)
    return value


def load_corpus(path) -> list[ImageRecord]:
    """Load corpus.jsonl into validated ImageRecords, order preserved."""
    records = []
    seen_ids = set()
    for lineno, obj in _read_jsonl(path):
        image_id = _require(obj, "image_id", str, lineno)
        if image_id in seen_ids:
            raise SchemaError(f"duplicate image_id {image_id!r}", lineno)
        seen_ids.add(image_id)
        captions = _require(obj, "captions", list, lineno)
        contexts = obj.get("contexts", [])
        if not isinstance(contexts, list):
            raise SchemaError("field 'contexts' must be a list", lineno)
        detections = []
        for ctx in contexts:
            if not isinstance(ctx, dict):
                raise SchemaError("each context must be an object", lineno)
            label = _require(ctx, "label", str, lineno)
            confidence = _require(ctx, "confidence", float, lineno)
            source = ctx.get("source", "other")
            try:
                detections.append(Detection(label, confidence, source))
            except SchemaError as exc:
                raise SchemaError(str(exc), lineno) from None
        for cap in captions:
            if not isinstance(cap, str):
                raise SchemaError("captions must be strings", lineno)
        try:
            records.append(ImageRecord(image_id, tuple(captions), tuple(detections)))
        except SchemaError as exc:
            raise SchemaError(str(exc), lineno) from None
    return records


def load_candidates(path) -> list[CandidateSet]:
    """Load candidates.jsonl; original_rank is the array position."""
    sets = []
    for lineno, obj in _read_jsonl(path):
        image_id = _require(obj, "image_id", str, lineno)
        raw_cands = _require(obj, "candidates", list, lineno)
        candidates = []
        for rank, cand in enumerate(raw_cands):
            if not isinstance(cand, dict):
                raise SchemaError("each candidate must be an object", lineno)
            text = _require(cand, "text", str, lineno)
            score = _require(cand, "score", float, lineno)
            explicit = cand.get("original_rank", rank)
            if not isinstance(explicit, int) or isinstance(explicit, bool):
                raise SchemaError("original_rank must be an integer", lineno)
            candidates.append(CandidateCaption(text, float(score), explicit))
        try:
            sets.append(CandidateSet(image_id, tuple(candidates)))
        except SchemaError as exc:
            raise SchemaError(str(exc), lineno) from None
    return sets


def load_embeddings(path, expected_dim: int | None = None) -> EmbeddingTable:
    """Load embeddings.jsonl, L2-normalizing every vector.

    Duplicate keys, mixed dimensions, and zero vectors are hard errors.
    """
    dim = expected_dim
    entries: dict[str, tuple[float, ...]] = {}
    for lineno, obj in _read_jsonl(path):
        key = _require(obj, "key", str, lineno)
        vector = _require(obj, "vector", list, lineno)
        if key in entries:
            raise SchemaError(f"duplicate embedding key {key!r}", lineno)
        values = []
        for x in vector:
            if not isinstance(x, (int, float)) or isinstance(x, bool):
                raise SchemaError(f"non-numeric vector entry for key {key!r}", lineno)
            values.append(float(x))
        if dim is None:
            dim = len(values)
        elif len(values) != dim:
            raise SchemaError(
                f"vector for {key!r} has dim {len(values)}, expected {dim}", lineno
            )
        norm = math.sqrt(sum(x * x for x in values))
        if norm == 0.0:
            raise SchemaError(f"zero vector for key {key!r} cannot be normalized", lineno)
        entries[key] = tuple(x / norm for x in values)
    if dim is None:
        dim = expected_dim or 0
    return EmbeddingTable(dim=dim, entries=entries)


def write_jsonl(path, rows) -> None:
    """Write dict rows as JSONL, deterministic byte-for-byte."""
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False, sort_keys=True))
            fh.write("\n")


def corpus_to_rows(records) -> list[dict]:
    return [
        {
            "image_id": r.image_id,
            "captions": list(r.human_captions),
            "contexts": [
                {"label": d.label, "confidence": d.confidence, "source": d.source}
                for d in r.detections
            ],
        }
        for r in records
    ]


def relatedness_to_rows(records) -> list[dict]:
    return [
        {
            "caption": r.caption,
            "context": r.context,
            "cosine": r.cosine,
            "label": r.label,
            "threshold": r.threshold,
        }
        for r in records
    ]
