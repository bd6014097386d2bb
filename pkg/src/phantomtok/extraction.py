"""Two views of a document's text, plus the hidden-text inspector.

The stream view concatenates every shown string in operator order, which is
how a reader that consumes the content stream sees the page. The human view
keeps only runs that actually paint glyphs.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass

from phantomtok.content import TextRun, TextState, parse_content, scan_text_runs
from phantomtok.errors import ExtractionError, PhantomError
from phantomtok.fonts import FontInfo, decode_shown_bytes, font_info
from phantomtok.pdf.document import Document

WHITE_THRESHOLD = 0.99
ALPHA_THRESHOLD = 0.01


class View(enum.Enum):
    STREAM = "stream"
    HUMAN = "human"


class VisibilityClass(enum.Enum):
    VISIBLE = "Visible"
    INVISIBLE_SIZE_ZERO = "InvisibleSizeZero"
    INVISIBLE_RENDER_MODE3 = "InvisibleRenderMode3"
    SUSPECT_TRANSPARENT = "SuspectTransparent"
    SUSPECT_WHITE_ON_WHITE = "SuspectWhiteOnWhite"

    @property
    def is_suspect(self) -> bool:
        return self in (VisibilityClass.SUSPECT_TRANSPARENT, VisibilityClass.SUSPECT_WHITE_ON_WHITE)


def classify(state: TextState, white_threshold: float = WHITE_THRESHOLD) -> VisibilityClass:
    if state.font_size <= 0:
        return VisibilityClass.INVISIBLE_SIZE_ZERO
    if state.render_mode == 3:
        return VisibilityClass.INVISIBLE_RENDER_MODE3
    if state.fill_alpha <= ALPHA_THRESHOLD:
        return VisibilityClass.SUSPECT_TRANSPARENT
    if state.fill_gray is not None and state.fill_gray >= white_threshold:
        return VisibilityClass.SUSPECT_WHITE_ON_WHITE
    return VisibilityClass.VISIBLE


def in_human_view(cls: VisibilityClass, strict: bool = False) -> bool:
    if cls is VisibilityClass.VISIBLE:
        return True
    return cls.is_suspect and not strict


@dataclass(frozen=True)
class DecodedRun:
    run: TextRun
    text: str
    visibility: VisibilityClass
    partial_code: bool


class _FontCache:
    def __init__(self, doc: Document):
        self.doc = doc
        self.by_id: dict[int, tuple[dict, FontInfo]] = {}

    def get(self, font: dict | None) -> FontInfo:
        if font is None:
            return font_info(None)
        hit = self.by_id.get(id(font))
        if hit is None or hit[0] is not font:
            hit = (font, font_info(font, self.doc))
            self.by_id[id(font)] = hit
        return hit[1]


def page_runs(doc: Document, page_index: int, white_threshold: float = WHITE_THRESHOLD, fonts: _FontCache | None = None) -> list[DecodedRun]:
    """Decoded and classified runs of one page (form XObjects expanded)."""
    fonts = fonts or _FontCache(doc)
    page_id = doc.page_order[page_index]
    try:
        ops = parse_content(doc.page_content(page_id))
        runs = scan_text_runs(ops, doc.page_resources(page_id), doc, expand_forms=True)
    except PhantomError as exc:
        raise ExtractionError(page_index, exc) from exc
    decoded = []
    for run in runs:
        text, partial = decode_shown_bytes(fonts.get(run.font), run.raw)
        decoded.append(DecodedRun(run, text, classify(run.state, white_threshold), partial))
    return decoded


def join_runs(runs: list[DecodedRun], keep) -> str:
    """Concatenate kept runs; a single space marks a repositioning between them."""
    parts: list[str] = []
    pending_break = False
    for item in runs:
        pending_break = pending_break or item.run.break_before
        if not keep(item):
            continue
        if parts and pending_break:
            parts.append(" ")
        parts.append(item.text)
        pending_break = False
    return "".join(parts)


def extract_text(
    doc: Document,
    view: View | str = View.STREAM,
    *,
    strict: bool = False,
    white_threshold: float = WHITE_THRESHOLD,
) -> str:
    """Text of every page in page order, pages separated by newlines.

    ``strict`` drops suspect runs (white or fully transparent fill) from the
    human view as well.
    """
    view = View(view)
    fonts = _FontCache(doc)
    if view is View.STREAM:
        keep = lambda item: True  # noqa: E731
    else:
        keep = lambda item: in_human_view(item.visibility, strict)  # noqa: E731
    pages = [join_runs(page_runs(doc, i, white_threshold, fonts), keep) for i in range(len(doc.page_order))]
    return "\n".join(pages)


@dataclass(frozen=True)
class HiddenRunReport:
    page: int
    op_index: int
    visibility: VisibilityClass
    text: str
    byte_length: int

    def to_record(self) -> dict:
        return {
            "page": self.page,
            "op_index": self.op_index,
            "class": self.visibility.value,
            "length": self.byte_length,
            "text": self.text,
        }

    def to_line(self) -> str:
        return json.dumps(self.to_record(), ensure_ascii=False)


def list_hidden_runs(doc: Document, white_threshold: float = WHITE_THRESHOLD) -> list[HiddenRunReport]:
    fonts = _FontCache(doc)
    reports = []
    for page in range(len(doc.page_order)):
        for item in page_runs(doc, page, white_threshold, fonts):
            if item.visibility is VisibilityClass.VISIBLE:
                continue
            reports.append(HiddenRunReport(page, item.run.op_index, item.visibility, item.text, len(item.run.raw)))
    return reports


def is_subsequence(needle: str, haystack: str) -> bool:
    """Two-pointer check that ``needle`` can be read out of ``haystack`` in order."""
    if not needle:
        return True
    i = 0
    for ch in haystack:
        if ch == needle[i]:
            i += 1
            if i == len(needle):
                return True
    return False
