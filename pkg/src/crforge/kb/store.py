"""In-memory vector store, one per framework, with optional archive persistence."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from crforge.errors import StoreFormatError
from crforge.kb.chunking import Chunk, ChunkingConfig, chunk_document
from crforge.kb.corpus import Corpus
from crforge.kb.embedding import EmbeddingProvider, EmbeddingVector, embed, is_zero

ARCHIVE_HEADER = "CRFORGE-KB v1"


@dataclass(frozen=True)
class VectorStore:
    """Immutable set of (chunk, embedding) entries sharing one dimension."""

    framework_name: str
    dimension: int
    entries: list[tuple[Chunk, EmbeddingVector]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)

    def equals(self, other: VectorStore) -> bool:
        if (
            self.framework_name != other.framework_name
            or self.dimension != other.dimension
            or len(self.entries) != len(other.entries)
        ):
            return False
        return all(
            c1 == c2 and np.array_equal(v1, v2)
            for (c1, v1), (c2, v2) in zip(self.entries, other.entries)
        )


def build_store(
    corpus: Corpus,
    chunk_cfg: ChunkingConfig,
    provider: EmbeddingProvider,
    framework_name: str,
) -> VectorStore:
    """Chunk and embed a corpus into a store.

    Chunks that embed to the zero vector (whitespace-only or token-free text)
    are skipped: they would poison cosine similarity. Identical inputs always
    rebuild an identical store.
    """
    entries: list[tuple[Chunk, EmbeddingVector]] = []
    for doc in corpus:
        for chunk in chunk_document(doc, chunk_cfg):
            vec = embed(chunk.text, provider)
            if is_zero(vec):
                continue
            entries.append((chunk, vec))
    return VectorStore(framework_name=framework_name, dimension=provider.dimension, entries=entries)


def save_store(store: VectorStore, path: str | Path) -> None:
    """Persist a store as a single archive: header line + JSON chunk table."""
    payload = {
        "framework_name": store.framework_name,
        "dimension": store.dimension,
        "entries": [
            {
                "doc_id": chunk.doc_id,
                "seq": chunk.seq,
                "text": chunk.text,
                "char_range": list(chunk.char_range),
                "vector": [float(x) for x in vec],
            }
            for chunk, vec in store.entries
        ],
    }
    Path(path).write_text(ARCHIVE_HEADER + "\n" + json.dumps(payload) + "\n", encoding="utf-8")


def load_store(path: str | Path) -> VectorStore:
    """Load an archive written by save_store; float64 values round-trip exactly."""
    raw = Path(path).read_text(encoding="utf-8")
    header, _, body = raw.partition("\n")
    if header != ARCHIVE_HEADER:
        raise StoreFormatError(f"bad archive header {header!r}, expected {ARCHIVE_HEADER!r}")
    try:
        payload = json.loads(body)
    except json.JSONDecodeError as exc:
        raise StoreFormatError(f"corrupt archive body: {exc}") from exc

    entries = [
        (
            Chunk(
                doc_id=e["doc_id"],
                seq=e["seq"],
                text=e["text"],
                char_range=(e["char_range"][0], e["char_range"][1]),
            ),
            np.asarray(e["vector"], dtype=np.float64),
        )
        for e in payload["entries"]
    ]
    return VectorStore(
        framework_name=payload["framework_name"],
        dimension=payload["dimension"],
        entries=entries,
    )
