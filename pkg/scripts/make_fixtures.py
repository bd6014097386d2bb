"""Regenerate the PDF fixtures under tests/data.

Object-stream and encrypted files are produced by pikepdf (qpdf) so the
reader is exercised against a producer other than our own writer.  The
incremental-update file is spliced together by hand.
"""
from __future__ import annotations

import io
import re
from pathlib import Path

import pikepdf

from phantomtok.eyesight import build_text_pdf
from phantomtok.pdf import write_document

OUT = Path(__file__).resolve().parents[1] / "tests" / "data"

PARAGRAPHS = [
    "Justin Rose won the tournament after a tense final round.",
    "The committee will publish its findings next week.",
]


def base_pdf() -> bytes:
    return write_document(build_text_pdf(PARAGRAPHS))


def incremental(data: bytes) -> bytes:
    """Append a revision that replaces the first page's content stream."""
    startxref = int(data.rsplit(b"startxref", 1)[1].split()[0])
    body = b"BT /F1 12 Tf 72 700 Td (Second revision) Tj ET"
    offset = len(data)
    update = b"4 0 obj\n<< /Length %d >>\nstream\n%s\nendstream\nendobj\n" % (len(body), body)
    xref_at = offset + len(update)
    size = int(re.findall(rb"/Size\s+(\d+)", data)[-1])
    update += b"xref\n0 1\n0000000000 65535 f\r\n4 1\n%010d 00000 n\r\n" % offset
    update += b"trailer\n<< /Size %d /Root 1 0 R /Prev %d >>\nstartxref\n%d\n%%%%EOF\n" % (size, startxref, xref_at)
    return data + update


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    data = base_pdf()
    (OUT / "plain.pdf").write_bytes(data)
    (OUT / "incremental.pdf").write_bytes(incremental(data))
    with pikepdf.open(io.BytesIO(data)) as pdf:
        pdf.save(OUT / "objstm.pdf", object_stream_mode=pikepdf.ObjectStreamMode.generate, compress_streams=True)
        pdf.save(OUT / "encrypted.pdf", encryption=pikepdf.Encryption(owner="owner", user="", R=4))


if __name__ == "__main__":
    main()
