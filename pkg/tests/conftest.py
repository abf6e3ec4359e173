"""Shared fixtures: golden description files and small knowledge bases."""

from pathlib import Path

import pytest

DATA_DIR = Path(__file__).parent / "data"
GOLDEN_DIR = DATA_DIR / "golden"


@pytest.fixture(scope="session")
def basic_range_text() -> str:
    return (DATA_DIR / "basic_range.yml").read_text()


@pytest.fixture(scope="session")
def golden_texts() -> dict[str, str]:
    return {p.name: p.read_text() for p in sorted(GOLDEN_DIR.glob("*.yml"))}


@pytest.fixture
def kb_root(tmp_path) -> Path:
    """A tiny framework corpus folder usable as a knowledge-base root."""
    fw = tmp_path / "kb" / "cyris"
    fw.mkdir(parents=True)
    (fw / "guide.md").write_text(
        "The description file has host_settings, guest_settings and clone_settings "
        "sections. Every clone host entry needs an entry_point guest and a custom "
        "topology with at least one named network listing its members."
    )
    (fw / "example.yml").write_text((DATA_DIR / "basic_range.yml").read_text())
    return tmp_path / "kb"
