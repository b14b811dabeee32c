"""Relatedness-dataset construction: confidence filtering, semantic
dedup, cosine soft labels at multiple thresholds, the caption-overlap
subset, and context frequency statistics."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .corpus import Detection, EmbeddingTable, ImageRecord, RelatednessRecord
from .scorer import cosine
from .textnorm import tokenize


@dataclass
class BuilderConfig:
    confidence_threshold: float = 0.2
    top_k_contexts: int = 3
    dedup_threshold: float = 0.9
    label_thresholds: tuple[float, ...] = (0.2, 0.3, 0.4)
    context_join: str = "concatenated"

    def __post_init__(self):
        if self.top_k_contexts < 1:
            raise ValueError("top_k_contexts must be >= 1")
        if not 0.0 <= self.confidence_threshold <= 1.0:
            raise ValueError("confidence_threshold must be in [0, 1]")
        if not 0.0 < self.dedup_threshold <= 1.0:
            raise ValueError("dedup_threshold must be in (0, 1]")
        for th in self.label_thresholds:
            if not 0.0 <= th <= 1.0:
                raise ValueError(f"label threshold {th} outside [0, 1]")
        if self.context_join not in ("concatenated", "per_object"):
            raise ValueError(f"unknown context_join {self.context_join!r}")


@dataclass
class BuildReport:
    """Per-run accounting of images that produced no records."""

    images_processed: int = 0
    images_skipped: int = 0
    skipped_ids: list[str] = field(default_factory=list)


def filter_detections(detections, cfg: BuilderConfig) -> list[Detection]:
    """Drop detections below the confidence threshold (strictly below,
    so the boundary value is kept) and keep at most top_k per source
    classifier by descending confidence."""
    kept = [d for d in detections if d.confidence >= cfg.confidence_threshold]
    kept.sort(key=lambda d: (-d.confidence, d.label))
    per_source: Counter = Counter()
    out = []
    for d in kept:
        if per_source[d.source] < cfg.top_k_contexts:
            per_source[d.source] += 1
            out.append(d)
    return out


def dedup_contexts(detections, emb: EmbeddingTable, cfg: BuilderConfig) -> list[Detection]:
    """Greedy semantic dedup in confidence-descending order.

    A detection is dropped when its label equals an already-kept label,
    or when the cosine of their label embeddings reaches the dedup
    threshold.
    """
    ordered = sorted(detections, key=lambda d: (-d.confidence, d.label))
    kept: list[Detection] = []
    for d in ordered:
        duplicate = False
        for k in kept:
            if d.label == k.label:
                duplicate = True
                break
            if cosine(emb[d.label], emb[k.label]) >= cfg.dedup_threshold:
                duplicate = True
                break
        if not duplicate:
            kept.append(d)
    return kept


def relatedness_score(context_text: str, caption: str, emb: EmbeddingTable) -> float:
    """Cosine between the context-text and caption embeddings."""
    return cosine(emb[context_text], emb[caption])


def assign_label(score: float, th: float) -> int:
    """1 iff score >= th (boundary inclusive)."""
    return 1 if score >= th else 0


def _retained_contexts(record: ImageRecord, emb, cfg):
    return dedup_contexts(filter_detections(record.detections, cfg), emb, cfg)


def build_relatedness_dataset(
    corpus, emb: EmbeddingTable, cfg: BuilderConfig | None = None, report: BuildReport | None = None
) -> list[RelatednessRecord]:
    """One record per (human caption, label threshold) per image whose
    contexts survive filtering; deterministic output order."""
    cfg = cfg or BuilderConfig()
    records = []
    for image in corpus:
        contexts = _retained_contexts(image, emb, cfg)
        if report is not None:
            report.images_processed += 1
        if not contexts:
            if report is not None:
                report.images_skipped += 1
                report.skipped_ids.append(image.image_id)
            continue
        if cfg.context_join == "concatenated":
            context_texts = [" ".join(d.label for d in contexts)]
        else:
            context_texts = [d.label for d in contexts]
        for caption in image.human_captions:
            for context_text in context_texts:
                score = relatedness_score(context_text, caption, emb)
                for th in sorted(cfg.label_thresholds):
                    records.append(
                        RelatednessRecord(
                            caption=caption,
                            context=context_text,
                            cosine=score,
                            label=assign_label(score, th),
                            threshold=th,
                        )
                    )
    return records


def _contains_contiguous(caption_tokens, label_tokens) -> bool:
    n = len(label_tokens)
    if n == 0 or n > len(caption_tokens):
        return False
    return any(
        caption_tokens[i : i + n] == label_tokens
        for i in range(len(caption_tokens) - n + 1)
    )


def build_overlap_dataset(corpus, emb: EmbeddingTable, cfg: BuilderConfig | None = None) -> list[RelatednessRecord]:
    """The overlap subset: a record per caption whose tokens contain
    some retained context label as a contiguous token run. The context
    field holds only the overlapping label(s), label fixed to 1."""
    cfg = cfg or BuilderConfig()
    records = []
    for image in corpus:
        contexts = _retained_contexts(image, emb, cfg)
        for caption in image.human_captions:
            cap_tokens = tokenize(caption)
            overlapping = [
                d.label
                for d in contexts
                if _contains_contiguous(cap_tokens, tokenize(d.label))
            ]
            if overlapping:
                records.append(
                    RelatednessRecord(
                        caption=caption,
                        context=" ".join(overlapping),
                        cosine=1.0,
                        label=1,
                        threshold=0.0,
                    )
                )
    return records


def context_frequency(records) -> list[tuple[str, int]]:
    """Descending (context label token, count); ties alphabetical."""
    counts: Counter = Counter()
    for r in records:
        for token in r.context.split():
            counts[token] += 1
    return sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
