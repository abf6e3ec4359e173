"""Cosine similarity and maximal-marginal-relevance selection."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from crforge.errors import EmptyStore, SimilarityUndefined
from crforge.kb.chunking import Chunk
from crforge.kb.embedding import EmbeddingVector

if TYPE_CHECKING:
    from crforge.kb.store import VectorStore


@dataclass(frozen=True)
class RetrievalConfig:
    """MMR retrieval parameters.

    fetch_k chunks are pulled by plain query similarity, then k of them are
    greedily selected with relevance/diversity weight lambda_mult.
    """

    fetch_k: int = 20
    k: int = 8
    lambda_mult: float = 0.5

    def __post_init__(self) -> None:
        if not 1 <= self.k <= self.fetch_k:
            raise ValueError(f"need 1 <= k <= fetch_k, got k={self.k}, fetch_k={self.fetch_k}")
        if not 0.0 <= self.lambda_mult <= 1.0:
            raise ValueError(f"lambda_mult must be in [0, 1], got {self.lambda_mult}")


def cosine_similarity(a: EmbeddingVector, b: EmbeddingVector) -> float:
    """dot(a, b) / (|a| * |b|), clamped to [-1, 1] against rounding."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise SimilarityUndefined(f"dimension mismatch: {a.shape} vs {b.shape}")
    norm_a = float(np.linalg.norm(a))
    norm_b = float(np.linalg.norm(b))
    if norm_a == 0.0 or norm_b == 0.0:
        raise SimilarityUndefined("cosine similarity is undefined for the zero vector")
    return float(np.clip(float(np.dot(a, b)) / (norm_a * norm_b), -1.0, 1.0))


def mmr_select(query: EmbeddingVector, store: VectorStore, cfg: RetrievalConfig) -> list[Chunk]:
    """Select up to cfg.k chunks by greedy maximal marginal relevance.

    The candidate pool is the top cfg.fetch_k entries by cosine similarity to
    the query. Selection then repeatedly takes the candidate maximizing

        lambda_mult * sim(query, d) - (1 - lambda_mult) * max(sim(d, s) for s in selected)

    (the first pick is simply the most query-similar candidate). All ties
    break by (doc_id, seq) ascending so output is deterministic.
    """
    if not store.entries:
        raise EmptyStore(f"vector store {store.framework_name!r} has no entries")

    sims = [(cosine_similarity(query, vec), chunk) for chunk, vec in store.entries]
    order = sorted(
        range(len(sims)),
        key=lambda i: (-sims[i][0], sims[i][1].doc_id, sims[i][1].seq),
    )
    pool = order[: cfg.fetch_k]

    selected: list[int] = []
    remaining = list(pool)
    while remaining and len(selected) < cfg.k:
        best_idx = None
        best_key: tuple[float, str, int] | None = None
        for i in remaining:
            relevance = sims[i][0]
            if selected:
                redundancy = max(
                    cosine_similarity(store.entries[i][1], store.entries[j][1])
                    for j in selected
                )
                score = cfg.lambda_mult * relevance - (1.0 - cfg.lambda_mult) * redundancy
            else:
                score = relevance
            chunk = sims[i][1]
            key = (-score, chunk.doc_id, chunk.seq)
            if best_key is None or key < best_key:
                best_key = key
                best_idx = i
        assert best_idx is not None
        selected.append(best_idx)
        remaining.remove(best_idx)

    return [store.entries[i][0] for i in selected]
