"""Builders for fixture documents: plain text renderings and the eyesight probe."""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from phantomtok.content import ContentOp, serialize_content
from phantomtok.pdf.document import Document
from phantomtok.pdf.objects import Name, Ref, Stream

logger = logging.getLogger(__name__)

PROBE_PROMPT = (
    "Please read the attached PDF and give me the text in it. "
    "Only output the text without anything else."
)
OPACITY_LEVELS = (1.0, 0.5, 0.0)
# relative sizes; 1 corresponds to 10pt
SIZE_LEVELS = (1.0, 0.5, 0.1, 0.0)


@dataclass(frozen=True)
class TextLayout:
    page_size: tuple[float, float] = (612, 792)
    margin: float = 72
    base_font_size: float = 10
    leading: float = 12
    font: str = "Times-Roman"

    def __post_init__(self):
        width, height = self.page_size
        if not (2 * self.margin < width and 2 * self.margin < height):
            raise ValueError("margins leave no room on the page")
        if self.leading < self.base_font_size:
            raise ValueError("leading must be at least the font size")
        if self.font not in _widths():
            raise ValueError(f"no width metrics for font {self.font!r}")


@lru_cache(maxsize=None)
def _widths() -> dict[str, list[int]]:
    return json.loads(resources.files("phantomtok.data").joinpath("widths.json").read_text("utf-8"))


def standard_font(base_font: str) -> dict:
    return {
        "Type": Name("Font"),
        "Subtype": Name("Type1"),
        "BaseFont": Name(base_font),
        "Encoding": Name("WinAnsiEncoding"),
    }


def encode_winansi(text: str) -> tuple[bytes, int]:
    """WinAnsi bytes for ``text`` and the number of characters replaced by '?'."""
    out = bytearray()
    replaced = 0
    for ch in text:
        try:
            out += ch.encode("cp1252")
        except UnicodeEncodeError:
            out += b"?"
            replaced += 1
    return bytes(out), replaced


def assemble(pages: list[tuple[bytes, dict]], page_size=(612, 792), version: str = "1.7") -> Document:
    """Build a document from ``(content bytes, resources)`` per page."""
    objects: dict = {}
    catalog, pages_id = (1, 0), (2, 0)
    kids = []
    num = 3
    for content, res in pages:
        page_id, content_id = (num, 0), (num + 1, 0)
        num += 2
        objects[content_id] = Stream({"Length": len(content)}, content)
        objects[page_id] = {
            "Type": Name("Page"),
            "Parent": Ref(*pages_id),
            "MediaBox": [0, 0, page_size[0], page_size[1]],
            "Resources": res,
            "Contents": Ref(*content_id),
        }
        kids.append(Ref(*page_id))
    objects[catalog] = {"Type": Name("Catalog"), "Pages": Ref(*pages_id)}
    objects[pages_id] = {"Type": Name("Pages"), "Kids": kids, "Count": len(kids)}
    order = [(k.num, k.gen) for k in kids]
    return Document(version, objects, {"Root": Ref(*catalog)}, order)


def _wrap(words: list[bytes], widths: list[int], size: float, limit: float) -> list[list[bytes]]:
    space = widths[32] * size / 1000
    lines: list[list[bytes]] = []
    line: list[bytes] = []
    used = 0.0
    for word in words:
        w = sum(widths[b] for b in word) * size / 1000
        if line and used + space + w > limit:
            lines.append(line)
            line, used = [], 0.0
        used = w if not line else used + space + w
        line.append(word)
    if line:
        lines.append(line)
    return lines


def build_text_pdf(paragraphs: list[str], layout: TextLayout | None = None) -> Document:
    """Typeset paragraphs single-column with greedy word wrap."""
    if not paragraphs:
        raise ValueError("need at least one paragraph")
    layout = layout or TextLayout()
    widths = _widths()[layout.font]
    width, height = layout.page_size
    limit = width - 2 * layout.margin
    lines_per_page = max(1, int((height - 2 * layout.margin) // layout.leading))
    replaced = 0
    lines: list[bytes | None] = []
    for i, para in enumerate(paragraphs):
        encoded = []
        for word in para.split():
            raw, n = encode_winansi(word)
            replaced += n
            encoded.append(raw)
        if i and lines:
            lines.append(None)  # blank line between paragraphs
        lines.extend(b" ".join(line) for line in _wrap(encoded, widths, layout.base_font_size, limit))
    if replaced:
        logger.warning("replaced %d unencodable character(s) with '?'", replaced)

    resources = {"Font": {"F1": standard_font(layout.font)}}
    pages = []
    top = height - layout.margin - layout.base_font_size
    for start in range(0, max(len(lines), 1), lines_per_page):
        chunk = lines[start : start + lines_per_page]
        while chunk and chunk[0] is None:
            chunk = chunk[1:]
        ops = [
            ContentOp("BT"),
            ContentOp("Tf", [Name("F1"), layout.base_font_size]),
            ContentOp("TL", [layout.leading]),
            ContentOp("Td", [layout.margin, top]),
        ]
        for j, line in enumerate(chunk):
            if j:
                ops.append(ContentOp("T*"))
            if line is not None:
                ops.append(ContentOp("Tj", [line]))
        ops.append(ContentOp("ET"))
        pages.append((serialize_content(ops), resources))
    return assemble(pages, layout.page_size)


def opacity_marker(color: str, alpha: float) -> str:
    return f"{color} opacity {alpha:.1f}"


def size_marker(scale: float) -> str:
    return f"Size {scale:.1f}"


def eyesight_markers() -> list[str]:
    return (
        [opacity_marker("Black", a) for a in OPACITY_LEVELS]
        + [opacity_marker("White", a) for a in OPACITY_LEVELS]
        + [size_marker(s) for s in SIZE_LEVELS]
    )


def _text(x: float, y: float, size: float, text: str) -> list[ContentOp]:
    raw, _ = encode_winansi(text)
    return [
        ContentOp("BT"),
        ContentOp("Tf", [Name("F1"), size]),
        ContentOp("Td", [x, y]),
        ContentOp("Tj", [raw]),
        ContentOp("ET"),
    ]


def build_eyesight_pdf() -> Document:
    """One-page probe: text at three opacities in black and white-on-black,
    and at four sizes (10, 5, 1 and 0 pt)."""
    gstates = {f"GSa{i}": {"Type": Name("ExtGState"), "ca": a} for i, a in enumerate(OPACITY_LEVELS)}
    resources = {"Font": {"F1": standard_font("Helvetica")}, "ExtGState": gstates}
    ops: list[ContentOp] = []
    ops += _text(72, 720, 12, "LLM eyesight probe")
    ops += _text(72, 700, 10, PROBE_PROMPT)
    ops += _text(72, 660, 10, "Text opacity (1 / 0.5 / 0), black on white:")
    for i, alpha in enumerate(OPACITY_LEVELS):
        ops += [ContentOp("q"), ContentOp("gs", [Name(f"GSa{i}")]), ContentOp("g", [0])]
        ops += _text(72 + 160 * i, 640, 10, opacity_marker("Black", alpha))
        ops.append(ContentOp("Q"))
    ops += _text(72, 600, 10, "Text opacity (1 / 0.5 / 0), white on black:")
    for i, alpha in enumerate(OPACITY_LEVELS):
        x = 72 + 160 * i
        ops += [ContentOp("q"), ContentOp("g", [0]), ContentOp("re", [x - 4, 574, 120, 20]), ContentOp("f"), ContentOp("Q")]
        ops += [ContentOp("q"), ContentOp("gs", [Name(f"GSa{i}")]), ContentOp("rg", [1, 1, 1])]
        ops += _text(x, 580, 10, opacity_marker("White", alpha))
        ops.append(ContentOp("Q"))
    ops += _text(72, 540, 10, "Text size (1 = 10pt):")
    for i, scale in enumerate(SIZE_LEVELS):
        ops += _text(72 + 120 * i, 520, 10 * scale, size_marker(scale))
    return assemble([(serialize_content(ops), resources)])
