"""Corpus loading: one folder per framework, one document per text file."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from crforge.errors import CorpusLoadError, UnknownFramework

CORPUS_SUFFIXES = (".txt", ".md", ".yml", ".yaml")


@dataclass(frozen=True)
class Document:
    """A single corpus document, identified by its path relative to the framework folder."""

    doc_id: str
    text: str


Corpus = list[Document]


def load_corpus(root_path: str | Path, framework_name: str) -> Corpus:
    """Load every corpus file under ``root_path/framework_name``.

    Documents come back in lexicographic doc_id order so repeated loads are
    deterministic. Missing folder raises UnknownFramework; a file that is not
    valid UTF-8 raises CorpusLoadError naming the file.
    """
    folder = Path(root_path) / framework_name
    if not folder.is_dir():
        raise UnknownFramework(framework_name, f"no folder at {folder}")

    docs: Corpus = []
    for path in sorted(folder.rglob("*")):
        if not path.is_file() or path.suffix.lower() not in CORPUS_SUFFIXES:
            continue
        doc_id = path.relative_to(folder).as_posix()
        try:
            text = path.read_text(encoding="utf-8")
        except UnicodeDecodeError as exc:
            raise CorpusLoadError(doc_id, f"not valid UTF-8: {exc}") from exc
        except OSError as exc:
            raise CorpusLoadError(doc_id, str(exc)) from exc
        docs.append(Document(doc_id=doc_id, text=text))

    docs.sort(key=lambda d: d.doc_id)
    return docs


def list_frameworks(root_path: str | Path) -> list[str]:
    """Names of framework folders under the knowledge-base root (sorted)."""
    root = Path(root_path)
    if not root.is_dir():
        return []
    return sorted(p.name for p in root.iterdir() if p.is_dir())
