"""Embedding providers.

The reference provider is a seeded feature-hashed unigram+bigram vectorizer:
fully offline and deterministic, so retrieval behaviour is reproducible in
tests. Remote embedding models plug in behind the same provider contract.
"""

from __future__ import annotations

import hashlib
import re
from typing import Protocol, runtime_checkable

import numpy as np

from crforge.errors import EmbeddingError

EmbeddingVector = np.ndarray

_TOKEN_RE = re.compile(r"[a-z0-9]+")

DEFAULT_DIMENSION = 256


@runtime_checkable
class EmbeddingProvider(Protocol):
    """Contract every embedding provider satisfies."""

    @property
    def dimension(self) -> int: ...

    def embed(self, text: str) -> EmbeddingVector: ...


class HashedNgramVectorizer:
    """Feature-hashed unigram+bigram counts, L2-normalized.

    Token hashes are keyed by the seed via blake2b, so vectors are stable
    across processes and independent of PYTHONHASHSEED. Text with no word
    tokens embeds to the zero vector; callers must not store those.
    """

    def __init__(self, dimension: int = DEFAULT_DIMENSION, seed: int = 0):
        if dimension <= 0:
            raise ValueError(f"dimension must be positive, got {dimension}")
        self._dimension = dimension
        self._key = seed.to_bytes(8, "little", signed=True)

    @property
    def dimension(self) -> int:
        return self._dimension

    def _bucket(self, token: str) -> int:
        digest = hashlib.blake2b(token.encode("utf-8"), key=self._key, digest_size=8).digest()
        return int.from_bytes(digest, "little") % self._dimension

    def embed(self, text: str) -> EmbeddingVector:
        tokens = _TOKEN_RE.findall(text.lower())
        vec = np.zeros(self._dimension, dtype=np.float64)
        for tok in tokens:
            vec[self._bucket(tok)] += 1.0
        for a, b in zip(tokens, tokens[1:]):
            vec[self._bucket(f"{a} {b}")] += 1.0
        norm = float(np.linalg.norm(vec))
        if norm > 0.0:
            vec /= norm
        return vec


def embed(text: str, provider: EmbeddingProvider) -> EmbeddingVector:
    """Embed text with the given provider, checking the dimension contract.

    Provider failures (e.g. a remote provider's transport) surface as
    EmbeddingError.
    """
    try:
        raw = provider.embed(text)
    except Exception as exc:
        raise EmbeddingError(f"embedding provider failed: {exc}") from exc
    vec = np.asarray(raw, dtype=np.float64)
    if vec.shape != (provider.dimension,):
        raise EmbeddingError(
            f"provider returned shape {vec.shape}, expected ({provider.dimension},)"
        )
    return vec


def is_zero(vec: EmbeddingVector) -> bool:
    return not np.any(vec)
