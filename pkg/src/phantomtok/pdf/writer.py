"""Serialize a :class:`Document` as a single-revision PDF with a classic xref table."""
from __future__ import annotations

from phantomtok.errors import UnresolvableReference
from phantomtok.pdf.document import Document
from phantomtok.pdf.filters import encode_flate
from phantomtok.pdf.objects import Name, Stream, serialize_value

_BINARY_MARKER = b"%\xe2\xe3\xcf\xd3\n"


def check_references(doc: Document) -> None:
    for ref in doc.iter_refs():
        if (ref.num, ref.gen) not in doc.objects:
            raise UnresolvableReference(f"reference {ref} has no object")


def write_document(doc: Document, compress: bool = False) -> bytes:
    """Emit every object of ``doc`` in ascending id order.

    Stream payloads are written as stored. With ``compress`` set, streams that
    carry no filter are Flate-encoded on the way out.
    """
    check_references(doc)
    out = bytearray(b"%PDF-" + doc.version.encode() + b"\n" + _BINARY_MARKER)
    offsets: dict[int, tuple[int, int]] = {}
    for num, gen in sorted(doc.objects):
        value = doc.objects[(num, gen)]
        offsets[num] = (len(out), gen)
        out += b"%d %d obj\n" % (num, gen)
        if isinstance(value, Stream):
            attrs = dict(value.attrs)
            data = value.data
            if compress and attrs.get("Filter") is None:
                data = encode_flate(data)
                attrs["Filter"] = Name("FlateDecode")
            attrs["Length"] = len(data)
            out += serialize_value(attrs) + b"\nstream\n" + data + b"\nendstream"
        else:
            out += serialize_value(value)
        out += b"\nendobj\n"

    size = max(offsets, default=0) + 1
    xref_offset = len(out)
    out += b"xref\n0 %d\n" % size
    free = [n for n in range(size) if n not in offsets]
    next_free = {n: (free[i + 1] if i + 1 < len(free) else 0) for i, n in enumerate(free)}
    for num in range(size):
        if num in offsets:
            offset, gen = offsets[num]
            out += b"%010d %05d n\r\n" % (offset, gen)
        else:
            out += b"%010d %05d f\r\n" % (next_free[num], 65535 if num == 0 else 1)
    trailer = dict(doc.trailer)
    trailer["Size"] = size
    out += b"trailer\n" + serialize_value(trailer) + b"\nstartxref\n%d\n%%%%EOF\n" % xref_offset
    return bytes(out)

