"""Textual visual-context relatedness toolkit.

Builds caption/visual-context relatedness datasets from detection and
caption files, trains and applies similarity-based caption re-rankers,
computes caption quality, diversity, and gender-bias statistics, and
performs exact visual-context-based caption search. All pretrained-model
dependencies stay behind JSONL file formats.
"""

from .corpus import (
    CandidateCaption,
    CandidateSet,
    Detection,
    EmbeddingTable,
    ImageRecord,
    RelatednessRecord,
    SchemaError,
    load_candidates,
    load_corpus,
    load_embeddings,
)

__all__ = [
    "CandidateCaption",
    "CandidateSet",
    "Detection",
    "EmbeddingTable",
    "ImageRecord",
    "RelatednessRecord",
    "SchemaError",
    "load_candidates",
    "load_corpus",
    "load_embeddings",
]

__version__ = "0.1.0"
