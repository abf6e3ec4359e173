"""Sliding-window character chunking of corpus documents."""

from __future__ import annotations

from dataclasses import dataclass

from crforge.kb.corpus import Document


@dataclass(frozen=True)
class ChunkingConfig:
    """Window size and overlap, both in characters."""

    chunk_size: int = 1000
    chunk_overlap: int = 200

    def __post_init__(self) -> None:
        if self.chunk_size <= 0:
            raise ValueError(f"chunk_size must be positive, got {self.chunk_size}")
        if not 0 <= self.chunk_overlap < self.chunk_size:
            raise ValueError(
                f"chunk_overlap must be in [0, chunk_size), got {self.chunk_overlap}"
            )

    @property
    def stride(self) -> int:
        return self.chunk_size - self.chunk_overlap


@dataclass(frozen=True)
class Chunk:
    """A contiguous character slice of one document.

    char_range is a half-open [start, end) offset pair into the source text;
    text always equals the source slice at that range.
    """

    doc_id: str
    seq: int
    text: str
    char_range: tuple[int, int]


def chunk_document(doc: Document, cfg: ChunkingConfig) -> list[Chunk]:
    """Split a document into overlapping windows.

    Window starts form the arithmetic progression 0, stride, 2*stride, ...
    so consecutive chunks overlap by exactly cfg.chunk_overlap; the last
    chunk may be shorter. Every source character lands in at least one chunk.
    An empty document yields no chunks.
    """
    text = doc.text
    if not text:
        return []

    chunks: list[Chunk] = []
    start = 0
    while True:
        end = min(start + cfg.chunk_size, len(text))
        chunks.append(
            Chunk(doc_id=doc.doc_id, seq=len(chunks), text=text[start:end], char_range=(start, end))
        )
        if end == len(text):
            break
        start += cfg.stride
    return chunks
