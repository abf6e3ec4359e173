"""Independent oracles for retrieval: scalar cosine and brute-force greedy MMR.

These deliberately share no code with the package implementations; they
re-derive every similarity with plain Python arithmetic.
"""

import math

from crforge.kb.chunking import Chunk
from crforge.kb.retrieval import RetrievalConfig
from crforge.kb.store import VectorStore


def oracle_cosine(a, b) -> float:
    dot = sum(x * y for x, y in zip(a, b))
    na = math.sqrt(sum(x * x for x in a))
    nb = math.sqrt(sum(y * y for y in b))
    return dot / (na * nb)


def oracle_mmr(query, store: VectorStore, cfg: RetrievalConfig) -> list[Chunk]:
    """Greedy marginal-relevance selection written straight from the recurrence."""
    scored = []
    for chunk, vec in store.entries:
        scored.append((oracle_cosine(query, vec), chunk, vec))
    pool = sorted(scored, key=lambda t: (-t[0], t[1].doc_id, t[1].seq))[: cfg.fetch_k]

    selected = []
    while pool and len(selected) < cfg.k:
        candidates = []
        for rel, chunk, vec in pool:
            if selected:
                red = max(oracle_cosine(vec, svec) for _, _, svec in selected)
                score = cfg.lambda_mult * rel - (1 - cfg.lambda_mult) * red
            else:
                score = rel
            candidates.append((score, chunk, vec, rel))
        candidates.sort(key=lambda t: (-t[0], t[1].doc_id, t[1].seq))
        best = candidates[0]
        selected.append((best[3], best[1], best[2]))
        pool = [t for t in pool if t[1] is not best[1]]
    return [chunk for _, chunk, _ in selected]
