"""FlateDecode with PNG predictors: the only filter the toolkit decodes."""
from __future__ import annotations

import zlib

from phantomtok.errors import CorruptStream, UnsupportedFilter


def _filter_names(attrs: dict, resolve) -> list[str]:
    filt = resolve(attrs.get("Filter"))
    if filt is None:
        return []
    if isinstance(filt, list):
        return [str(resolve(f)) for f in filt]
    return [str(filt)]


def _decode_parms(attrs: dict, resolve) -> dict:
    parms = resolve(attrs.get("DecodeParms"))
    if isinstance(parms, list):
        parms = resolve(parms[0]) if parms else None
    return parms or {}


def inflate(data: bytes) -> bytes:
    try:
        return zlib.decompress(data)
    except zlib.error:
        pass
    # tolerate a missing or damaged adler32 trailer, which some producers emit
    try:
        d = zlib.decompressobj()
        out = d.decompress(data)
        if not out and data:
            raise zlib.error("no output")
        return out
    except zlib.error as exc:
        raise CorruptStream(f"inflate failed: {exc}") from exc


def unpredict_png(data: bytes, columns: int = 1, colors: int = 1, bits: int = 8) -> bytes:
    """Undo PNG row predictors (tags 0-4 per row)."""
    bpp = max(1, colors * bits // 8)
    row_len = (columns * colors * bits + 7) // 8
    stride = row_len + 1
    out = bytearray()
    prev = bytearray(row_len)
    for start in range(0, len(data), stride):
        tag = data[start]
        row = bytearray(data[start + 1 : start + stride])
        if len(row) < row_len:
            row.extend(bytes(row_len - len(row)))
        if tag == 1:
            for i in range(bpp, row_len):
                row[i] = (row[i] + row[i - bpp]) & 0xFF
        elif tag == 2:
            for i in range(row_len):
                row[i] = (row[i] + prev[i]) & 0xFF
        elif tag == 3:
            for i in range(row_len):
                left = row[i - bpp] if i >= bpp else 0
                row[i] = (row[i] + ((left + prev[i]) >> 1)) & 0xFF
        elif tag == 4:
            for i in range(row_len):
                a = row[i - bpp] if i >= bpp else 0
                b = prev[i]
                c = prev[i - bpp] if i >= bpp else 0
                p = a + b - c
                pa, pb, pc = abs(p - a), abs(p - b), abs(p - c)
                if pa <= pb and pa <= pc:
                    pred = a
                elif pb <= pc:
                    pred = b
                else:
                    pred = c
                row[i] = (row[i] + pred) & 0xFF
        elif tag != 0:
            raise CorruptStream(f"bad PNG predictor tag {tag}")
        out += row
        prev = row
    return bytes(out)


def decode_stream(stream, doc=None) -> bytes:
    """Return the fully decoded payload of ``stream``.

    ``doc`` is only needed when Filter or DecodeParms are indirect.
    """
    resolve = doc.resolve if doc is not None else (lambda v: v)
    names = _filter_names(stream.attrs, resolve)
    if not names:
        return stream.data
    if names != ["FlateDecode"]:
        bad = next((n for n in names if n != "FlateDecode"), names[0])
        raise UnsupportedFilter(f"unsupported filter {bad}")
    data = inflate(stream.data)
    parms = _decode_parms(stream.attrs, resolve)
    predictor = resolve(parms.get("Predictor", 1))
    if predictor == 1:
        return data
    if 10 <= predictor <= 15:
        return unpredict_png(
            data,
            columns=resolve(parms.get("Columns", 1)),
            colors=resolve(parms.get("Colors", 1)),
            bits=resolve(parms.get("BitsPerComponent", 8)),
        )
    raise UnsupportedFilter(f"unsupported predictor {predictor}")


def encode_flate(data: bytes) -> bytes:
    return zlib.compress(data)
