"""Load a PDF file into a :class:`Document`."""
from __future__ import annotations

import logging
import re

from phantomtok.errors import (
    CircularReference,
    MalformedHeader,
    PdfError,
    PdfSyntaxError,
    UnsupportedEncryption,
    XrefNotFound,
)
from phantomtok.pdf.document import MAX_REF_CHAIN, Document, ObjectId, collect_pages
from phantomtok.pdf.filters import decode_stream
from phantomtok.pdf.lexer import KEYWORD, NUM, Lexer
from phantomtok.pdf.objects import Ref, Stream

logger = logging.getLogger(__name__)

_HEADER = re.compile(rb"%PDF-(\d+\.\d+)")
_STARTXREF = re.compile(rb"startxref\s+(\d+)")
_OBJ_HEADER = re.compile(rb"\s*(\d+)\s+(\d+)\s+obj\b")
_STREAM_KW = re.compile(rb"[\x00\t\n\x0c\r ]*stream(?:\r\n|\n|\r)?")
_ENDSTREAM = re.compile(rb"(\r\n|\n|\r)?endstream")

# keys that describe a cross-reference section rather than the document
_XREF_ONLY_KEYS = {"Size", "Prev", "XRefStm", "Type", "W", "Index", "Filter", "DecodeParms", "Length"}


def parse_document(data: bytes) -> Document:
    m = _HEADER.match(data)
    if m is None:
        raise MalformedHeader("file does not start with a %PDF- header")
    version = m.group(1).decode()
    return _Reader(data).load(version)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        # object number -> (1, offset, gen) | (2, container, index)
        self.entries: dict[int, tuple[int, int, int]] = {}
        self.cache: dict[ObjectId, object] = {}
        self.objstm_cache: dict[int, dict[int, object]] = {}
        self.containers: set[int] = set()
        self.loading: list[ObjectId] = []

    # cross-reference sections

    def load(self, version: str) -> Document:
        trailer = self._read_xref_chain()
        if "Encrypt" in trailer:
            raise UnsupportedEncryption("encrypted PDFs (/Encrypt in trailer) are not supported")
        objects = {}
        for num, entry in sorted(self.entries.items()):
            if entry[0] == 1:
                key = (num, entry[2])
            else:
                key = (num, 0)
            value = self._load(num)
            if isinstance(value, Stream) and value.get("Type") in ("ObjStm", "XRef"):
                continue
            if num in self.containers:
                continue
            objects[key] = value
        trailer = {k: v for k, v in trailer.items() if k not in _XREF_ONLY_KEYS}
        if not isinstance(trailer.get("Root"), Ref):
            raise PdfError("trailer has no /Root reference")
        page_order = collect_pages(objects, trailer)
        return Document(version, objects, trailer, page_order)

    def _read_xref_chain(self) -> dict:
        tail = self.data[-2048:]
        matches = list(_STARTXREF.finditer(tail))
        if not matches:
            matches = list(_STARTXREF.finditer(self.data))
        if not matches:
            raise XrefNotFound("no startxref marker")
        offset: int | None = int(matches[-1].group(1))
        trailer: dict = {}
        visited: set[int] = set()
        while offset is not None:
            if offset in visited:
                logger.warning("cross-reference Prev chain loops at offset %d", offset)
                break
            visited.add(offset)
            section_trailer, section_entries = self._read_section(offset)
            stm = section_trailer.get("XRefStm")
            if isinstance(stm, int) and stm not in visited:
                visited.add(stm)
                _, stm_entries = self._read_section(stm)
                for num, entry in stm_entries.items():
                    self.entries.setdefault(num, entry)
            for num, entry in section_entries.items():
                self.entries.setdefault(num, entry)
            for key, value in section_trailer.items():
                trailer.setdefault(key, value)
            prev = section_trailer.get("Prev")
            offset = prev if isinstance(prev, int) else None
        # free entries only mask older sections; drop them now
        self.entries = {n: e for n, e in self.entries.items() if e[0] != 0}
        return trailer

    def _read_section(self, offset: int) -> tuple[dict, dict[int, tuple[int, int, int]]]:
        if offset >= len(self.data):
            raise XrefNotFound(f"startxref offset {offset} is past end of file")
        lexer = Lexer(self.data, offset)
        tok = lexer.next_token()
        if tok is not None and tok[0] == KEYWORD and tok[1] == b"xref":
            return self._read_table(lexer)
        if tok is not None and tok[0] == NUM and _OBJ_HEADER.match(self.data, offset):
            return self._read_xref_stream(offset)
        raise XrefNotFound(f"no cross-reference section at offset {offset}")

    def _read_table(self, lexer: Lexer):
        entries: dict[int, tuple[int, int, int]] = {}
        while True:
            tok = lexer.next_token()
            if tok is None:
                raise XrefNotFound("cross-reference table without trailer")
            if tok[0] == KEYWORD and tok[1] == b"trailer":
                break
            if tok[0] != NUM:
                raise PdfSyntaxError("bad cross-reference subsection header", tok[2])
            start = tok[1]
            count = lexer.next_token()[1]
            for i in range(count):
                off = lexer.next_token()[1]
                gen = lexer.next_token()[1]
                kind = lexer.next_token()[1]
                num = start + i
                if num in entries:
                    continue
                if kind == b"n" and off > 0:
                    entries[num] = (1, off, gen)
                else:
                    entries[num] = (0, 0, gen)
        trailer = lexer.read_object()
        if not isinstance(trailer, dict):
            raise PdfSyntaxError("trailer is not a dictionary", lexer.pos)
        return trailer, entries

    def _read_xref_stream(self, offset: int):
        _, _, stream = self._read_indirect(offset)
        if not isinstance(stream, Stream):
            raise XrefNotFound(f"object at offset {offset} is not a cross-reference stream")
        raw = decode_stream(stream)
        widths = stream.get("W")
        size = stream.get("Size")
        index = stream.get("Index") or [0, size]
        entries: dict[int, tuple[int, int, int]] = {}
        pos = 0
        for start, count in zip(index[0::2], index[1::2]):
            for i in range(count):
                fields = []
                for w in widths:
                    fields.append(int.from_bytes(raw[pos : pos + w], "big") if w else None)
                    pos += w
                kind = 1 if fields[0] is None else fields[0]
                second = fields[1] or 0
                third = fields[2] if fields[2] is not None else 0
                entries.setdefault(start + i, (kind, second, third))
        return dict(stream.attrs), entries

    # objects

    def _load(self, num: int):
        entry = self.entries.get(num)
        if entry is None:
            return None
        key = (num, entry[2] if entry[0] == 1 else 0)
        if key in self.cache:
            return self.cache[key]
        if key in self.loading or len(self.loading) > MAX_REF_CHAIN:
            raise CircularReference(f"object {num} depends on itself while loading")
        self.loading.append(key)
        try:
            if entry[0] == 1:
                _, _, value = self._read_indirect(entry[1])
            else:
                value = self._load_compressed(entry[1], entry[2], num)
        finally:
            self.loading.pop()
        self.cache[key] = value
        return value

    def _resolve_int(self, value) -> int:
        hops = 0
        while isinstance(value, Ref):
            hops += 1
            if hops > MAX_REF_CHAIN:
                raise CircularReference(f"reference chain through {value}")
            value = self._load(value.num)
        if not isinstance(value, int):
            raise PdfSyntaxError("stream /Length is not an integer")
        return value

    def _read_indirect(self, offset: int):
        m = _OBJ_HEADER.match(self.data, offset)
        if m is None:
            raise PdfSyntaxError("expected 'N G obj'", offset)
        num, gen = int(m.group(1)), int(m.group(2))
        lexer = Lexer(self.data, m.end())
        value = lexer.read_object()
        if isinstance(value, dict):
            sm = _STREAM_KW.match(self.data, lexer.pos)
            if sm is not None:
                value = self._read_stream_body(value, sm.end())
        return num, gen, value

    def _read_stream_body(self, attrs: dict, start: int) -> Stream:
        data = self.data
        length = None
        try:
            length = self._resolve_int(attrs.get("Length"))
        except (PdfSyntaxError, CircularReference):
            length = None
        if length is not None and _ENDSTREAM.match(data, start + length) is not None:
            payload = data[start : start + length]
        else:
            end = data.find(b"endstream", start)
            if end < 0:
                raise PdfSyntaxError("stream without endstream", start)
            payload = data[start:end]
            if payload.endswith(b"\r\n"):
                payload = payload[:-2]
            elif payload.endswith((b"\n", b"\r")):
                payload = payload[:-1]
        attrs = dict(attrs)
        attrs["Length"] = len(payload)
        return Stream(attrs, payload)

    def _load_compressed(self, container: int, index: int, num: int):
        objs = self.objstm_cache.get(container)
        if objs is None:
            stream = self._load(container)
            if not isinstance(stream, Stream):
                raise PdfSyntaxError(f"object stream {container} is missing")
            self.containers.add(container)
            raw = decode_stream(stream)
            n = self._resolve_int(stream.get("N"))
            first = self._resolve_int(stream.get("First"))
            header = Lexer(raw)
            pairs = [(header.read_object(False), header.read_object(False)) for _ in range(n)]
            objs = {}
            for obj_num, rel in pairs:
                lexer = Lexer(raw, first + rel)
                objs[obj_num] = lexer.read_object()
            self.objstm_cache[container] = objs
        if num not in objs:
            raise PdfSyntaxError(f"object {num} not found in object stream {container}")
        return objs[num]
