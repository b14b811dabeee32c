"""Bridges pretrained classifiers and sentence encoders to the caption
ranking pipeline's JSONL file formats."""

from .classifiers import (
    ClipZeroShotClassifier,
    ColorNameClassifier,
    LuminanceClassifier,
    ModelUnavailableError,
    Resnet152Classifier,
    make_classifier,
)
from .encoders import HashedBagOfWordsEncoder, SentenceTransformerEncoder, make_encoder
from .export import ExtractReport, embed_texts, extract_contexts, list_images, write_jsonl

__version__ = "0.1.0"

__all__ = [
    "ClipZeroShotClassifier",
    "ColorNameClassifier",
    "ExtractReport",
    "HashedBagOfWordsEncoder",
    "LuminanceClassifier",
    "ModelUnavailableError",
    "Resnet152Classifier",
    "SentenceTransformerEncoder",
    "embed_texts",
    "extract_contexts",
    "list_images",
    "make_classifier",
    "make_encoder",
    "write_jsonl",
]
