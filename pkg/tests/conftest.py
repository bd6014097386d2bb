from __future__ import annotations

from pathlib import Path

import pytest

from phantomtok.eyesight import assemble, standard_font
from phantomtok.pdf import Document, parse_document, write_document

DATA = Path(__file__).parent / "data"


def one_page(content: bytes, fonts: dict | None = None, extra_resources: dict | None = None) -> Document:
    """Single-page document with /F1 = Helvetica unless ``fonts`` overrides it."""
    resources = {"Font": fonts if fonts is not None else {"F1": standard_font("Helvetica")}}
    resources.update(extra_resources or {})
    return assemble([(content, resources)])


def reparse(doc: Document) -> Document:
    return parse_document(write_document(doc))


@pytest.fixture
def data_dir() -> Path:
    return DATA
