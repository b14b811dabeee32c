"""Exact brute-force cosine kNN over caption embeddings, visual-context
queries, and Recall@K."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class SearchIndex:
    """Immutable row-normalized matrix with one caption id per row."""

    dim: int
    ids: list[str]
    matrix: np.ndarray


def build_index(entries) -> SearchIndex:
    """Normalize and stack (id, vector) entries; insertion order kept."""
    ids = []
    rows = []
    seen = set()
    dim = None
    for entry_id, vec in entries:
        if entry_id in seen:
            raise ValueError(f"duplicate id {entry_id!r}")
        seen.add(entry_id)
        v = np.asarray(vec, dtype=float)
        if dim is None:
            dim = v.shape[0]
        elif v.shape[0] != dim:
            raise ValueError(f"vector for {entry_id!r} has dim {v.shape[0]}, expected {dim}")
        norm = np.linalg.norm(v)
        if norm == 0.0:
            raise ValueError(f"zero vector for id {entry_id!r}")
        ids.append(entry_id)
        rows.append(v / norm)
    if not ids:
        raise ValueError("index needs at least one entry")
    matrix = np.vstack(rows)
    matrix.setflags(write=False)
    return SearchIndex(dim=dim, ids=ids, matrix=matrix)


def knn(index: SearchIndex, query, k: int) -> list[tuple[str, float]]:
    """Exact top-k by inner product of normalized vectors (= cosine),
    sorted score descending with ties broken by ascending id."""
    if k < 1:
        raise ValueError("k must be >= 1")
    q = np.asarray(query, dtype=float)
    if q.shape[0] != index.dim:
        raise ValueError(f"query dim {q.shape[0]} != index dim {index.dim}")
    norm = np.linalg.norm(q)
    if norm == 0.0:
        raise ValueError("zero query vector")
    scores = index.matrix @ (q / norm)
    k = min(k, len(index.ids))
    # Bounded selection first, then a total order over the survivors.
    part = np.argpartition(-scores, k - 1)[:k] if k < len(index.ids) else np.arange(len(index.ids))
    order = sorted(part, key=lambda i: (-scores[i], index.ids[i]))
    # argpartition can split a tie group at the boundary; re-check the
    # cut against the full order when ties are possible at rank k.
    if k < len(index.ids):
        cut = scores[order[-1]]
        boundary_ties = np.flatnonzero(scores == cut)
        if len(boundary_ties) > 1:
            order = sorted(
                np.flatnonzero(scores >= cut), key=lambda i: (-scores[i], index.ids[i])
            )[:k]
    return [(index.ids[i], float(scores[i])) for i in order]


def recall_at_k(index: SearchIndex, queries, k: int) -> float:
    """Fraction of (query, gold id) pairs whose gold id is in the top-k."""
    queries = list(queries)
    if not queries:
        raise ValueError("need at least one query")
    known = set(index.ids)
    hits = 0
    for query, gold in queries:
        if gold not in known:
            raise ValueError(f"gold id {gold!r} not in index")
        hits += any(rid == gold for rid, _ in knn(index, query, k))
    return hits / len(queries)


def search_by_context(index: SearchIndex, context_labels, emb, k: int) -> list[tuple[str, float]]:
    """kNN using the embedding of the space-joined context labels."""
    labels = list(context_labels)
    if not labels:
        raise ValueError("context label list must be nonempty")
    return knn(index, emb[" ".join(labels)], k)
