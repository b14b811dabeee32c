"""Deterministic model-free embeddings for pipeline plumbing and tests.

Each token maps to a pseudo-random unit vector whose direction is a pure
function of (token, dim, seed). The hash is SHA-256 (stable across
platforms and processes); the per-token stream comes from PCG64 seeded
with the hash, so two runs anywhere produce bitwise-identical vectors.
Text embeddings are the L2-normalized mean of token vectors.
"""

from __future__ import annotations

import hashlib

import numpy as np

from .corpus import EmbeddingTable
from .textnorm import tokenize


def _token_seed(token: str, seed: int) -> int:
    digest = hashlib.sha256(f"{seed}\x00{token}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def embed_token(token: str, dim: int, seed: int) -> np.ndarray:
    """Unit vector of length dim, deterministic in (token, dim, seed)."""
    if dim < 2:
        raise ValueError("dim must be >= 2")
    rng = np.random.Generator(np.random.PCG64(_token_seed(token, seed)))
    v = rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def embed_text(text: str, dim: int, seed: int) -> np.ndarray:
    """Normalized bag-of-words mean of token vectors (order-invariant)."""
    tokens = tokenize(text)
    if not tokens:
        raise ValueError(f"text {text!r} has no tokens to embed")
    mean = np.mean([embed_token(t, dim, seed) for t in tokens], axis=0)
    norm = np.linalg.norm(mean)
    if norm == 0.0:
        # Astronomically unlikely cancellation; keep the contract total.
        raise ValueError(f"token vectors of {text!r} cancelled to zero")
    return mean / norm


def build_embedding_table(texts, dim: int, seed: int) -> EmbeddingTable:
    """Embed each unique text, keyed by the exact text."""
    entries = {}
    for text in texts:
        if text not in entries:
            entries[text] = tuple(float(x) for x in embed_text(text, dim, seed))
    return EmbeddingTable(dim=dim, entries=entries)
