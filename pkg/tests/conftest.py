from __future__ import annotations

from pathlib import Path

import pytest

from fivew1h.annotate import HeuristicProvider
from fivew1h.document import parse_document
from fivew1h.pipeline import default_resources

DATA_DIR = Path(__file__).resolve().parent / "data"


@pytest.fixture(scope="session")
def resources():
    return default_resources()


@pytest.fixture(scope="session")
def heuristic(resources):
    return HeuristicProvider(gazetteer=resources.gazetteer)


@pytest.fixture(scope="session")
def corpus_dir() -> Path:
    return DATA_DIR / "corpus"


@pytest.fixture(scope="session")
def fixture_doc():
    """12-sentence annotated article with 3 entities and a 4-mention chain."""
    return parse_document((DATA_DIR / "doc_fixture.json").read_bytes())


@pytest.fixture()
def fixture_doc_text() -> str:
    return (DATA_DIR / "doc_fixture.json").read_text(encoding="utf-8")
