"""PDF container layer: lexing, cross-reference resolution, filters, writing."""
from phantomtok.pdf.document import Document, ObjectId, collect_pages
from phantomtok.pdf.filters import decode_stream, encode_flate
from phantomtok.pdf.objects import HexString, Name, PdfValue, Ref, Stream, serialize_value
from phantomtok.pdf.reader import parse_document
from phantomtok.pdf.writer import write_document

__all__ = [
    "Document",
    "HexString",
    "Name",
    "ObjectId",
    "PdfValue",
    "Ref",
    "Stream",
    "collect_pages",
    "decode_stream",
    "encode_flate",
    "parse_document",
    "serialize_value",
    "write_document",
]
