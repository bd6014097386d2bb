"""Tokenizer for PDF object syntax, shared by the file reader and the
content-stream parser."""
from __future__ import annotations

import re
from decimal import Decimal

from phantomtok.errors import PdfSyntaxError, UnbalancedString
from phantomtok.pdf.objects import HexString, Name, Ref

_DELIM = rb"\x00\t\n\x0c\r ()<>\[\]{}/%"
_SKIP = re.compile(rb"(?:[\x00\t\n\x0c\r ]+|%[^\r\n]*)*")
_TOKEN = re.compile(
    rb"(?P<num>[+-]?(?:\d+\.?\d*|\.\d+))(?=[" + _DELIM + rb"]|\Z)"
    rb"|(?P<name>/[^" + _DELIM + rb"]*)"
    rb"|(?P<dopen><<)"
    rb"|(?P<dclose>>>)"
    rb"|(?P<hex><)"
    rb"|(?P<lit>\()"
    rb"|(?P<aopen>\[)"
    rb"|(?P<aclose>\])"
    rb"|(?P<brace>[{}])"
    rb"|(?P<kw>[^" + _DELIM + rb"]+)"
)
_LIT_SPECIAL = re.compile(rb"[()\\\r]")
_HEX_BODY = re.compile(rb"[^>]*")
_NAME_ESCAPE = re.compile(rb"#([0-9A-Fa-f]{2})")
_ESCAPES = {ord("n"): 10, ord("r"): 13, ord("t"): 9, ord("b"): 8, ord("f"): 12}

# token kinds
NUM, NAME, STRING, KEYWORD = "num", "name", "str", "kw"
DICT_OPEN, DICT_CLOSE, ARRAY_OPEN, ARRAY_CLOSE, BRACE = "<<", ">>", "[", "]", "brace"
_PUNCT = {"dopen": DICT_OPEN, "dclose": DICT_CLOSE, "aopen": ARRAY_OPEN, "aclose": ARRAY_CLOSE, "brace": BRACE}


class Keyword(bytes):
    """A bare token that is not a value: an operator or a structural keyword."""


def parse_name(raw: bytes) -> Name:
    if b"#" in raw:
        raw = _NAME_ESCAPE.sub(lambda m: bytes([int(m.group(1), 16)]), raw)
    return Name(raw.decode("latin-1"))


def parse_number(raw: bytes) -> int | Decimal:
    if b"." in raw:
        return Decimal(raw.decode())
    return int(raw)


class Lexer:
    """Pull tokens and whole objects out of a byte buffer starting at ``pos``."""

    def __init__(self, data: bytes, pos: int = 0):
        self.data = data
        self.pos = pos

    def skip_whitespace(self) -> None:
        self.pos = _SKIP.match(self.data, self.pos).end()

    def next_token(self):
        """Return ``(kind, value, start)`` or ``None`` at end of input."""
        self.skip_whitespace()
        data, start = self.data, self.pos
        if start >= len(data):
            return None
        m = _TOKEN.match(data, start)
        if m is None:
            # a lone '>' or similar stray delimiter
            self.pos = start + 1
            return KEYWORD, Keyword(data[start : start + 1]), start
        kind = m.lastgroup
        if kind == "num":
            self.pos = m.end()
            return NUM, parse_number(m.group()), start
        if kind == "name":
            self.pos = m.end()
            return NAME, parse_name(m.group()[1:]), start
        if kind == "lit":
            value, self.pos = read_literal(data, m.end())
            return STRING, value, start
        if kind == "hex":
            body = _HEX_BODY.match(data, m.end())
            if body.end() >= len(data):
                raise PdfSyntaxError("unterminated hex string", start)
            self.pos = body.end() + 1
            return STRING, decode_hex(body.group()), start
        self.pos = m.end()
        if kind == "kw":
            return KEYWORD, Keyword(m.group()), start
        return _PUNCT[kind], m.group(), start

    def read_value(self, token, allow_refs: bool = False):
        """Build a complete value whose first token is ``token``.

        Returns a Keyword unchanged when the token is not the start of a value.
        """
        kind, value, start = token
        if kind == NUM:
            if allow_refs and isinstance(value, int) and value >= 0:
                ref = self._try_ref(value)
                if ref is not None:
                    return ref
            return value
        if kind in (NAME, STRING):
            return value
        if kind == KEYWORD:
            if value == b"true":
                return True
            if value == b"false":
                return False
            if value == b"null":
                return None
            return value
        if kind == ARRAY_OPEN:
            items = []
            while True:
                tok = self.next_token()
                if tok is None:
                    raise PdfSyntaxError("unterminated array", start)
                if tok[0] == ARRAY_CLOSE:
                    return items
                item = self.read_value(tok, allow_refs)
                if isinstance(item, Keyword):
                    raise PdfSyntaxError(f"unexpected {item.decode('latin-1')!r} in array", tok[2])
                items.append(item)
        if kind == DICT_OPEN:
            result: dict = {}
            while True:
                tok = self.next_token()
                if tok is None:
                    raise PdfSyntaxError("unterminated dictionary", start)
                if tok[0] == DICT_CLOSE:
                    return result
                if tok[0] != NAME:
                    raise PdfSyntaxError("dictionary key is not a name", tok[2])
                vtok = self.next_token()
                if vtok is None:
                    raise PdfSyntaxError("unterminated dictionary", start)
                if vtok[0] == DICT_CLOSE:
                    # key without value: treat as null and close
                    result[tok[1]] = None
                    return result
                item = self.read_value(vtok, allow_refs)
                if isinstance(item, Keyword):
                    raise PdfSyntaxError("unexpected keyword in dictionary", vtok[2])
                result[tok[1]] = item
        raise PdfSyntaxError(f"unexpected token {kind!r}", start)

    def read_object(self, allow_refs: bool = True):
        tok = self.next_token()
        if tok is None:
            raise PdfSyntaxError("unexpected end of data", self.pos)
        return self.read_value(tok, allow_refs)

    def _try_ref(self, num: int) -> Ref | None:
        saved = self.pos
        tok = self.next_token()
        if tok is not None and tok[0] == NUM and isinstance(tok[1], int):
            tok2 = self.next_token()
            if tok2 is not None and tok2[0] == KEYWORD and tok2[1] == b"R":
                return Ref(num, tok[1])
        self.pos = saved
        return None


def decode_hex(body: bytes) -> HexString:
    digits = bytes(c for c in body if c not in b"\x00\t\n\x0c\r ")
    if len(digits) % 2:
        digits += b"0"
    try:
        return HexString(bytes.fromhex(digits.decode("ascii")))
    except ValueError as exc:
        raise PdfSyntaxError(f"bad hex string: {exc}") from exc


def read_literal(data: bytes, pos: int) -> tuple[bytes, int]:
    """Decode a literal string whose opening '(' ends just before ``pos``."""
    out = bytearray()
    depth = 1
    i = pos
    n = len(data)
    while True:
        m = _LIT_SPECIAL.search(data, i)
        if m is None:
            raise UnbalancedString("unbalanced literal string", pos - 1)
        j = m.start()
        out += data[i:j]
        c = data[j]
        if c == 0x28:
            depth += 1
            out.append(c)
            i = j + 1
        elif c == 0x29:
            depth -= 1
            if depth == 0:
                return bytes(out), j + 1
            out.append(c)
            i = j + 1
        elif c == 0x0D:
            out.append(0x0A)
            i = j + 1
            if i < n and data[i] == 0x0A:
                i += 1
        else:
            if j + 1 >= n:
                raise UnbalancedString("unbalanced literal string", pos - 1)
            e = data[j + 1]
            i = j + 2
            if e in _ESCAPES:
                out.append(_ESCAPES[e])
            elif 0x30 <= e <= 0x37:
                value = e - 0x30
                for _ in range(2):
                    if i < n and 0x30 <= data[i] <= 0x37:
                        value = value * 8 + data[i] - 0x30
                        i += 1
                    else:
                        break
                out.append(value & 0xFF)
            elif e == 0x0D:
                if i < n and data[i] == 0x0A:
                    i += 1
            elif e == 0x0A:
                pass
            else:
                out.append(e)
