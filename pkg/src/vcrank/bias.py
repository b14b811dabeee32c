"""Object-gender co-occurrence counts and bias ratios.

A caption co-occurs with an object when the object label appears as a
contiguous token run in the caption; gender presence is membership of
any lexicon term among the caption tokens. Ratios printed at table
precision are truncated (floored), matching how the source counts were
reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .textnorm import GenderLexicon, tokenize


@dataclass
class GenderCounts:
    object: str
    with_person: int = 0
    with_man: int = 0
    with_woman: int = 0


def _contains_contiguous(haystack, needle) -> bool:
    n = len(needle)
    if n == 0 or n > len(haystack):
        return False
    return any(haystack[i : i + n] == needle for i in range(len(haystack) - n + 1))


def cooccurrence(corpus, object_label: str, lexicon: GenderLexicon, unit: str = "caption") -> GenderCounts:
    """Count captions (or images, with unit="image") containing the
    object label together with a man/woman/person term. One caption can
    contribute to several columns."""
    if unit not in ("caption", "image"):
        raise ValueError(f"unknown counting unit {unit!r}")
    label_tokens = tokenize(object_label)
    counts = GenderCounts(object=object_label)
    for image in corpus:
        hit_person = hit_man = hit_woman = False
        for caption in image.human_captions:
            tokens = tokenize(caption)
            if not _contains_contiguous(tokens, label_tokens):
                continue
            toks = set(tokens)
            person = bool(toks & lexicon.person_terms)
            man = bool(toks & lexicon.man_terms)
            woman = bool(toks & lexicon.woman_terms)
            if unit == "caption":
                counts.with_person += person
                counts.with_man += man
                counts.with_woman += woman
            else:
                hit_person |= person
                hit_man |= man
                hit_woman |= woman
        if unit == "image":
            counts.with_person += hit_person
            counts.with_man += hit_man
            counts.with_woman += hit_woman
    return counts


def bias_towards_men(c: GenderCounts) -> float | None:
    """man / (man + woman); None when both counts are zero."""
    denom = c.with_man + c.with_woman
    if denom == 0:
        return None
    return c.with_man / denom


def ratio_to_person(c: GenderCounts, which: str) -> float | None:
    """Selected gender count divided by the person count; None when no
    person co-occurrences exist."""
    if which not in ("man", "woman"):
        raise ValueError("which must be 'man' or 'woman'")
    if c.with_person == 0:
        return None
    num = c.with_man if which == "man" else c.with_woman
    return num / c.with_person


def truncate(value: float, decimals: int) -> float:
    """Floor to the given number of decimals (display convention)."""
    scale = 10**decimals
    return math.floor(value * scale) / scale


@dataclass
class BiasRow:
    object: str
    counts: GenderCounts
    man_ratio: float | None
    woman_ratio: float | None
    towards_men: float | None


def bias_report(corpus, object_labels, lexicon: GenderLexicon, unit: str = "caption") -> list[BiasRow]:
    """One row per object: counts plus the three ratios, full precision."""
    rows = []
    for label in object_labels:
        counts = cooccurrence(corpus, label, lexicon, unit=unit)
        rows.append(
            BiasRow(
                object=label,
                counts=counts,
                man_ratio=ratio_to_person(counts, "man"),
                woman_ratio=ratio_to_person(counts, "woman"),
                towards_men=bias_towards_men(counts),
            )
        )
    return rows
