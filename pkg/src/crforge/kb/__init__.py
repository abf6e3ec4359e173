"""Per-framework knowledge bases: corpus loading, chunking, embedding, MMR retrieval."""

from crforge.kb.chunking import Chunk, ChunkingConfig, chunk_document
from crforge.kb.corpus import Corpus, Document, load_corpus
from crforge.kb.embedding import EmbeddingProvider, HashedNgramVectorizer, embed
from crforge.kb.retrieval import RetrievalConfig, cosine_similarity, mmr_select
from crforge.kb.store import VectorStore, build_store, load_store, save_store

__all__ = [
    "Chunk",
    "ChunkingConfig",
    "chunk_document",
    "Corpus",
    "Document",
    "load_corpus",
    "EmbeddingProvider",
    "HashedNgramVectorizer",
    "embed",
    "RetrievalConfig",
    "cosine_similarity",
    "mmr_select",
    "VectorStore",
    "build_store",
    "load_store",
    "save_store",
]
