"""In-memory representation of PDF values.

Mapping to Python types:

    null        None
    boolean     bool
    integer     int
    real        decimal.Decimal (kept exact so kerning survives a round trip)
    string      bytes, or HexString for strings written in <..> form
    name        Name (a str subclass holding the decoded name without '/')
    array       list
    dictionary  dict keyed by Name
    stream      Stream
    reference   Ref
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import Decimal
from typing import Any, Union


class Name(str):
    """A PDF name. Compares equal to the plain string of its characters."""

    __slots__ = ()

    def __repr__(self) -> str:
        return "/" + str(self)


class HexString(bytes):
    """Bytes that were written as a hex string. Equal to the same plain bytes."""

    def __repr__(self) -> str:
        return f"HexString({bytes(self)!r})"


@dataclass(frozen=True)
class Ref:
    num: int
    gen: int = 0

    def __repr__(self) -> str:
        return f"{self.num} {self.gen} R"


@dataclass
class Stream:
    """Stream dictionary plus the payload exactly as stored (still encoded)."""

    attrs: dict
    data: bytes = b""

    def get(self, key: str, default: Any = None) -> Any:
        return self.attrs.get(key, default)


PdfValue = Union[None, bool, int, Decimal, bytes, Name, list, dict, Stream, Ref]

_NAME_REGULAR = re.compile(rb"[^\x21-\x7e]|[()<>\[\]{}/%#]")
_WHITESPACE = b"\x00\t\n\x0c\r "


def format_number(value: int | float | Decimal) -> bytes:
    """Shortest plain-decimal spelling, never exponent notation."""
    if isinstance(value, bool):
        raise TypeError("bool is not a number")
    if isinstance(value, int):
        return str(value).encode()
    if isinstance(value, float):
        if value.is_integer():
            return str(int(value)).encode()
        value = Decimal(repr(value))
    text = format(value, "f")
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    if text in ("-0", ""):
        text = "0"
    return text.encode()


def format_name(name: str) -> bytes:
    raw = name.encode("latin-1")
    return b"/" + _NAME_REGULAR.sub(lambda m: b"#%02X" % m.group()[0], raw)


_STRING_ESCAPES = {
    ord("\\"): b"\\\\",
    ord("("): b"\\(",
    ord(")"): b"\\)",
    ord("\r"): b"\\r",
    ord("\n"): b"\\n",
}
_STRING_SPECIAL = re.compile(rb"[\\()\r\n]")


def format_string(data: bytes) -> bytes:
    """Literal-string form with only the escapes needed to reparse identically."""
    return b"(" + _STRING_SPECIAL.sub(lambda m: _STRING_ESCAPES[m.group()[0]], data) + b")"


def serialize_value(value: PdfValue) -> bytes:
    """Serialize a direct value. Streams are handled by the document writer."""
    if value is None:
        return b"null"
    if value is True:
        return b"true"
    if value is False:
        return b"false"
    if isinstance(value, Name):
        return format_name(value)
    if isinstance(value, (int, float, Decimal)):
        return format_number(value)
    if isinstance(value, HexString):
        return b"<" + value.hex().encode("ascii") + b">"
    if isinstance(value, (bytes, bytearray)):
        return format_string(bytes(value))
    if isinstance(value, Ref):
        return b"%d %d R" % (value.num, value.gen)
    if isinstance(value, list):
        return b"[" + b" ".join(serialize_value(v) for v in value) + b"]"
    if isinstance(value, dict):
        parts = []
        for key, item in value.items():
            parts.append(format_name(key) + b" " + serialize_value(item))
        return b"<<" + b" ".join(parts) + b">>"
    if isinstance(value, str):
        # bare str used as a name by convenience
        return format_name(value)
    raise TypeError(f"cannot serialize {type(value).__name__} as a direct PDF value")
