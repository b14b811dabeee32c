"""Sentence encoders that turn texts into fixed-dimension vectors.

``HashedBagOfWordsEncoder`` is a deterministic, model-free baseline:
each token maps to a pseudorandom gaussian vector seeded from its hash,
and a text is the mean of its token vectors. Texts sharing tokens
therefore share vector mass, which is exactly the property the
downstream relatedness pipeline relies on. ``SentenceTransformerEncoder``
wraps a pretrained sentence-transformers model when its weights are
available. Both return raw (possibly unnormalized) vectors; the
consumer normalizes on load.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field

import numpy as np

from .classifiers import ModelUnavailableError

_TOKEN_RE = re.compile(r"[a-z0-9]+(?:['-][a-z0-9]+)*")


@dataclass(frozen=True)
class HashedBagOfWordsEncoder:
    """Mean of per-token hash-seeded gaussian vectors."""

    dim: int = 256
    seed: int = 0

    def _token_vector(self, token: str) -> np.ndarray:
        digest = hashlib.sha256(f"{self.seed}\x00{token}".encode()).digest()
        rng = np.random.Generator(
            np.random.PCG64(int.from_bytes(digest[:8], "little"))
        )
        return rng.standard_normal(self.dim)

    def encode(self, texts) -> np.ndarray:
        texts = list(texts)
        if not texts:
            raise ValueError("texts must be nonempty")
        out = np.zeros((len(texts), self.dim))
        for i, text in enumerate(texts):
            tokens = _TOKEN_RE.findall(text.lower())
            if not tokens:
                raise ValueError(f"text {text!r} has no tokens to encode")
            out[i] = np.mean([self._token_vector(t) for t in tokens], axis=0)
        return out


@dataclass
class SentenceTransformerEncoder:
    """Pretrained sentence embeddings via sentence-transformers."""

    model_name: str = "sentence-transformers/all-distilroberta-v1"
    _model: object = field(default=None, repr=False, compare=False)

    def _load(self):
        if self._model is not None:
            return
        try:
            from sentence_transformers import SentenceTransformer

            self._model = SentenceTransformer(self.model_name)
        except Exception as exc:
            raise ModelUnavailableError(
                f"sentence encoder unavailable: {exc}"
            ) from exc

    def encode(self, texts) -> np.ndarray:
        texts = list(texts)
        if not texts:
            raise ValueError("texts must be nonempty")
        self._load()
        return np.asarray(self._model.encode(texts, convert_to_numpy=True))


def make_encoder(name: str, dim: int = 256, seed: int = 0):
    """Instantiate an encoder by name ("hashed-bow" or "sbert")."""
    if name == "hashed-bow":
        return HashedBagOfWordsEncoder(dim=dim, seed=seed)
    if name == "sbert":
        return SentenceTransformerEncoder()
    raise ValueError(f"unknown encoder {name!r}; choose from ['hashed-bow', 'sbert']")
