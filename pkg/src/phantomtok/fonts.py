"""Font encodings and ToUnicode maps: turning shown bytes into text."""
from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

from phantomtok.errors import PdfError
from phantomtok.pdf.document import Document
from phantomtok.pdf.lexer import KEYWORD, NUM, STRING, Lexer
from phantomtok.pdf.objects import Stream

logger = logging.getLogger(__name__)

REPLACEMENT = "�"
BASE_ENCODINGS = ("StandardEncoding", "WinAnsiEncoding", "MacRomanEncoding")
_UNI_NAME = re.compile(r"^uni((?:[0-9A-F]{4})+)$")
_U_NAME = re.compile(r"^u([0-9A-F]{4,6})$")


def _load_json(name: str):
    return json.loads(resources.files("phantomtok.data").joinpath(name).read_text("utf-8"))


@lru_cache(maxsize=None)
def encoding_vector(name: str) -> tuple[str | None, ...]:
    return tuple(_load_json("encodings.json")[name])


@lru_cache(maxsize=None)
def glyph_list() -> dict[str, str]:
    return _load_json("glyphlist.json")


def glyph_to_unicode(glyph: str) -> str | None:
    """Map a glyph name to text via the Adobe glyph list and uniXXXX forms."""
    base = glyph.split(".", 1)[0]
    if not base:
        return None
    if "_" in base:
        parts = [glyph_to_unicode(p) for p in base.split("_")]
        return None if None in parts else "".join(parts)
    hit = glyph_list().get(base)
    if hit is not None:
        return hit
    m = _UNI_NAME.match(base)
    if m:
        hexes = m.group(1)
        return "".join(chr(int(hexes[i : i + 4], 16)) for i in range(0, len(hexes), 4))
    m = _U_NAME.match(base)
    if m:
        return chr(int(m.group(1), 16))
    return None


@dataclass
class FontInfo:
    """How to decode the byte codes of one font.

    ``code_unit`` is 1 for simple fonts and 2 for composite (Identity) fonts.
    ``encoding`` maps single-byte codes to glyph names; ``to_unicode`` takes
    precedence over it when present.
    """

    code_unit: int = 1
    encoding: dict[int, str] = field(default_factory=dict)
    to_unicode: dict[int, str] | None = None
    name: str = ""

    @property
    def is_composite(self) -> bool:
        return self.code_unit == 2

    def char_for(self, code: int) -> str:
        if self.to_unicode is not None and code in self.to_unicode:
            return self.to_unicode[code]
        if self.code_unit == 1:
            glyph = self.encoding.get(code)
            if glyph is not None:
                text = glyph_to_unicode(glyph)
                if text is not None:
                    return text
        return REPLACEMENT


def simple_font(encoding: str = "WinAnsiEncoding", differences: dict[int, str] | None = None, to_unicode=None) -> FontInfo:
    table = {code: glyph for code, glyph in enumerate(encoding_vector(encoding)) if glyph}
    table.update(differences or {})
    return FontInfo(code_unit=1, encoding=table, to_unicode=to_unicode)


def composite_font(to_unicode: dict[int, str] | None = None) -> FontInfo:
    return FontInfo(code_unit=2, to_unicode=to_unicode)


def font_info(font: dict | None, doc: Document | None = None) -> FontInfo:
    """Build decoding info for a font dictionary (``None`` gives WinAnsi)."""
    if font is None:
        return simple_font()
    resolve = doc.resolve if doc is not None else (lambda v: v)
    to_unicode = None
    tu = resolve(font.get("ToUnicode"))
    if isinstance(tu, Stream):
        try:
            to_unicode = parse_cmap(doc.decode(tu) if doc is not None else tu.data)
        except PdfError as exc:
            logger.warning("ignoring unreadable ToUnicode CMap: %s", exc)
    name = str(resolve(font.get("BaseFont")) or "")
    if font.get("Subtype") == "Type0":
        info = composite_font(to_unicode)
        info.name = name
        return info
    base = "StandardEncoding"
    differences: dict[int, str] = {}
    enc = resolve(font.get("Encoding"))
    if isinstance(enc, str) and enc in BASE_ENCODINGS:
        base = str(enc)
    elif isinstance(enc, dict):
        be = resolve(enc.get("BaseEncoding"))
        if isinstance(be, str) and be in BASE_ENCODINGS:
            base = str(be)
        code = 0
        for item in resolve(enc.get("Differences")) or []:
            item = resolve(item)
            if isinstance(item, int):
                code = item
            elif isinstance(item, str):
                differences[code] = str(item)
                code += 1
    info = simple_font(base, differences, to_unicode)
    info.name = name
    return info


def decode_shown_bytes(font: FontInfo, raw: bytes) -> tuple[str, bool]:
    """Decode ``raw`` shown with ``font``.

    Returns ``(text, partial)``; ``partial`` is true when a trailing incomplete
    code was replaced by U+FFFD.
    """
    unit = font.code_unit
    if unit == 1:
        return raw.decode("latin-1").translate(_translation(font)), False
    whole = len(raw) - len(raw) % unit
    chars = [font.char_for(int.from_bytes(raw[i : i + unit], "big")) for i in range(0, whole, unit)]
    partial = whole != len(raw)
    if partial:
        chars.append(REPLACEMENT)
    return "".join(chars), partial


def _translation(font: FontInfo) -> dict[int, str]:
    cached = getattr(font, "_table", None)
    if cached is None:
        cached = {code: font.char_for(code) for code in range(256)}
        font._table = cached  # type: ignore[attr-defined]
    return cached


def parse_cmap(data: bytes) -> dict[int, str]:
    """Read bfchar/bfrange mappings of a ToUnicode CMap."""
    lexer = Lexer(data)
    mapping: dict[int, str] = {}
    operands: list = []
    section = None
    while True:
        tok = lexer.next_token()
        if tok is None:
            break
        kind, value, _ = tok
        if kind == KEYWORD:
            if value in (b"beginbfchar", b"beginbfrange"):
                section = value
            elif value == b"endbfchar":
                for src, dst in zip(operands[0::2], operands[1::2]):
                    if isinstance(src, bytes) and isinstance(dst, bytes):
                        mapping[int.from_bytes(src, "big")] = _utf16(dst)
                section = None
            elif value == b"endbfrange":
                for lo, hi, dst in zip(operands[0::3], operands[1::3], operands[2::3]):
                    _add_range(mapping, lo, hi, dst)
                section = None
            operands = []
            continue
        try:
            item = lexer.read_value(tok)
        except PdfError:
            continue
        if section is not None:
            operands.append(item)
    return mapping


def _add_range(mapping: dict[int, str], lo, hi, dst) -> None:
    if not (isinstance(lo, bytes) and isinstance(hi, bytes)):
        return
    start, end = int.from_bytes(lo, "big"), int.from_bytes(hi, "big")
    if end < start or end - start > 0xFFFF:
        return
    if isinstance(dst, list):
        for offset, item in enumerate(dst[: end - start + 1]):
            if isinstance(item, bytes):
                mapping[start + offset] = _utf16(item)
    elif isinstance(dst, bytes) and dst:
        base = bytearray(dst)
        for offset in range(end - start + 1):
            value = bytearray(base)
            value[-1] = (base[-1] + offset) & 0xFF
            mapping[start + offset] = _utf16(bytes(value))


def _utf16(data: bytes) -> str:
    if len(data) % 2:
        data = b"\x00" + data
    return data.decode("utf-16-be", errors="replace")
