"""Similarity primitives and the similarity-to-probability score used by
the re-rankers."""

from __future__ import annotations

import numpy as np

SIM_FLOOR = 1e-6


def cosine(u, v) -> float:
    """Cosine similarity of two vectors; rejects zero vectors."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise ValueError("cosine undefined for a zero vector")
    return float(np.dot(u, v) / (nu * nv))


def simprob(sim: float, confidences) -> float:
    """sim ** mean(confidences), with sim clamped into [1e-6, 1].

    The clamp keeps the power defined when the raw similarity is
    non-positive; confidence 1 everywhere reduces to the clamped sim.
    """
    confidences = list(confidences)
    if not confidences:
        raise ValueError("confidence list must be nonempty")
    for c in confidences:
        if not 0.0 <= c <= 1.0:
            raise ValueError(f"confidence {c} outside [0, 1]")
    s = min(max(sim, SIM_FLOOR), 1.0)
    p_c = sum(confidences) / len(confidences)
    return s**p_c


def context_similarity(caption: str, contexts, emb, mode: str = "concatenated") -> float:
    """Similarity between a caption and its visual context labels.

    concatenated: one cosine against the space-joined labels.
    per_object: max over per-label cosines.
    """
    if not contexts:
        raise ValueError("context list must be nonempty")
    caption_vec = emb[caption]
    if mode == "concatenated":
        joined = " ".join(d.label for d in contexts)
        return cosine(emb[joined], caption_vec)
    if mode == "per_object":
        return max(cosine(emb[d.label], caption_vec) for d in contexts)
    raise ValueError(f"unknown context mode {mode!r}")
