"""Shared tokenization, n-gram extraction, and the gender-term lexicon.

Every module that consumes raw text goes through the same tokenizer so
counts and overlaps stay comparable across the pipeline.
"""

from __future__ import annotations

import json
import unicodedata
from collections import Counter
from dataclasses import dataclass

# Characters kept inside a word even though they are punctuation.
_INTRA_WORD = {"-", "'", "’"}


def tokenize(text: str) -> list[str]:
    """Lowercase, strip punctuation (keeping intra-word hyphens and
    apostrophes), and split on whitespace."""
    out = []
    word: list[str] = []
    for ch in text.lower():
        if ch.isspace():
            if word:
                out.append("".join(word))
                word = []
            continue
        cat = unicodedata.category(ch)
        if cat.startswith("P") and ch not in _INTRA_WORD:
            continue
        word.append(ch)
    if word:
        out.append("".join(word))
    # Intra-word characters at the edges of a token are plain punctuation.
    cleaned = []
    for tok in out:
        tok = tok.strip("".join(_INTRA_WORD))
        if tok:
            cleaned.append(tok)
    return cleaned


def ngrams(tokens, n: int) -> Counter:
    """Multiset of contiguous n-token tuples, first-occurrence order."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


@dataclass(frozen=True)
class GenderLexicon:
    """Disjoint man/woman/person token sets plus a plural marker set."""

    man_terms: frozenset[str]
    woman_terms: frozenset[str]
    person_terms: frozenset[str]
    plural_terms: frozenset[str]

    def __post_init__(self):
        if not (self.man_terms and self.woman_terms and self.person_terms):
            raise ValueError("all three lexicon sets must be nonempty")
        if (
            self.man_terms & self.woman_terms
            or self.man_terms & self.person_terms
            or self.woman_terms & self.person_terms
        ):
            raise ValueError("lexicon sets must be pairwise disjoint")


_DEFAULT_MAN = frozenset(
    {"man", "men", "boy", "boys", "male", "males", "gentleman", "gentlemen", "guy", "guys"}
)
_DEFAULT_WOMAN = frozenset(
    {"woman", "women", "girl", "girls", "female", "females", "lady", "ladies"}
)
_DEFAULT_PERSON = frozenset({"person", "people", "persons"})
_DEFAULT_PLURAL = frozenset(
    {"men", "boys", "males", "gentlemen", "guys", "women", "girls", "females", "ladies", "people", "persons"}
)


def default_gender_lexicon() -> GenderLexicon:
    """The built-in man/woman/person token sets."""
    return GenderLexicon(_DEFAULT_MAN, _DEFAULT_WOMAN, _DEFAULT_PERSON, _DEFAULT_PLURAL)


def load_gender_lexicon(path) -> GenderLexicon:
    """Load a lexicon override file {"man": [...], "woman": [...],
    "person": [...], "plural": [...]}; disjointness is validated."""
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    man = frozenset(t.lower() for t in obj["man"])
    woman = frozenset(t.lower() for t in obj["woman"])
    person = frozenset(t.lower() for t in obj["person"])
    plural = frozenset(t.lower() for t in obj.get("plural", sorted(_DEFAULT_PLURAL)))
    return GenderLexicon(man, woman, person, plural)
