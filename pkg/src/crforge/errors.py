"""Shared exception types."""

from __future__ import annotations


class CrForgeError(Exception):
    """Base class for all crforge errors."""


class UnknownFramework(CrForgeError):
    """The named framework has no corpus folder / knowledge base."""

    def __init__(self, framework: str, detail: str = ""):
        self.framework = framework
        msg = f"unknown framework: {framework!r}"
        if detail:
            msg = f"{msg} ({detail})"
        super().__init__(msg)


class CorpusLoadError(CrForgeError):
    """A corpus file could not be read or decoded."""

    def __init__(self, path: str, reason: str):
        self.path = path
        self.reason = reason
        super().__init__(f"cannot load corpus file {path!r}: {reason}")


class EmbeddingError(CrForgeError):
    """The embedding provider failed to produce a vector."""


class SimilarityUndefined(CrForgeError):
    """Cosine similarity requested for a zero vector or mismatched dimensions."""


class EmptyStore(CrForgeError):
    """Retrieval requested against a vector store with no entries."""


class StoreFormatError(CrForgeError):
    """A persisted knowledge-base archive is malformed or has a bad version header."""


class BackendError(CrForgeError):
    """Transport or protocol failure talking to an LLM backend."""


class ScriptExhausted(BackendError):
    """The scripted backend ran out of replay turns."""


class ScriptFormatError(BackendError):
    """A replay script does not match the expected turn-object schema."""


class SessionStateError(CrForgeError):
    """An operation was invoked in a session status that does not permit it."""


class ConfigError(CrForgeError):
    """Missing or invalid configuration (framework profile, CLI flags)."""


class TransportError(CrForgeError):
    """The command transport failed outside of normal nonzero exits."""
