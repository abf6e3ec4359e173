"""Chunker window arithmetic: stride, overlap, coverage."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crforge.kb.chunking import Chunk, ChunkingConfig, chunk_document
from crforge.kb.corpus import Document


def _doc(n: int) -> Document:
    return Document(doc_id="d", text="x" * n)


def test_config_rejects_bad_values():
    with pytest.raises(ValueError):
        ChunkingConfig(chunk_size=0)
    with pytest.raises(ValueError):
        ChunkingConfig(chunk_size=100, chunk_overlap=100)
    with pytest.raises(ValueError):
        ChunkingConfig(chunk_size=100, chunk_overlap=-1)


def test_exact_window_doc_is_one_chunk():
    chunks = chunk_document(_doc(1000), ChunkingConfig(1000, 200))
    assert [c.char_range for c in chunks] == [(0, 1000)]


def test_1800_char_doc_splits_at_stride_800():
    # stride = 1000 - 200 = 800, so windows are [0,1000) and [800,1800)
    chunks = chunk_document(_doc(1800), ChunkingConfig(1000, 200))
    assert [c.char_range for c in chunks] == [(0, 1000), (800, 1800)]


def test_2500_char_doc_has_short_last_chunk():
    chunks = chunk_document(_doc(2500), ChunkingConfig(1000, 200))
    assert [c.char_range for c in chunks] == [(0, 1000), (800, 1800), (1600, 2500)]


def test_empty_doc_yields_no_chunks():
    assert chunk_document(_doc(0), ChunkingConfig(1000, 200)) == []


def test_chunk_fields():
    doc = Document(doc_id="guide.md", text="abcdefghij")
    chunks = chunk_document(doc, ChunkingConfig(4, 1))
    assert all(isinstance(c, Chunk) and c.doc_id == "guide.md" for c in chunks)
    assert [c.seq for c in chunks] == list(range(len(chunks)))
    for c in chunks:
        start, end = c.char_range
        assert c.text == doc.text[start:end]


@settings(max_examples=60)
@given(n=st.integers(min_value=0, max_value=50_000))
def test_starts_form_arithmetic_progression_and_cover(n):
    cfg = ChunkingConfig(1000, 200)
    chunks = chunk_document(_doc(n), cfg)
    if n == 0:
        assert chunks == []
        return
    starts = [c.char_range[0] for c in chunks]
    assert starts == [i * cfg.stride for i in range(len(chunks))]
    # contiguous coverage of [0, n) with no gaps
    covered_to = 0
    for start, end in (c.char_range for c in chunks):
        assert start <= covered_to
        covered_to = max(covered_to, end)
    assert covered_to == n
    # every chunk except possibly the last is full-size
    for c in chunks[:-1]:
        assert c.char_range[1] - c.char_range[0] == cfg.chunk_size


@settings(max_examples=40)
@given(
    n=st.integers(min_value=1, max_value=3000),
    size=st.integers(min_value=2, max_value=400),
    overlap_frac=st.floats(min_value=0.0, max_value=0.99),
)
def test_consecutive_chunks_overlap_exactly(n, size, overlap_frac):
    overlap = int(size * overlap_frac)
    cfg = ChunkingConfig(size, overlap)
    chunks = chunk_document(_doc(n), cfg)
    for a, b in zip(chunks, chunks[1:]):
        assert b.char_range[0] == a.char_range[0] + cfg.stride
        # overlap of consecutive ranges is exactly chunk_overlap
        assert a.char_range[1] - b.char_range[0] == cfg.chunk_overlap
