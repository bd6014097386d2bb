"""Regenerate the JSON tables under src/phantomtok/data.

Encoding vectors and standard-font widths come from reportlab's copy of the
Adobe core-14 metrics; glyph names come from fontTools' AGLFN table.
"""
from __future__ import annotations

import json
from pathlib import Path

from fontTools.agl import AGL2UV
from reportlab.pdfbase import _fontdata

OUT = Path(__file__).resolve().parents[1] / "src" / "phantomtok" / "data"


def main() -> None:
    encodings = {
        name: [None if g is None else g for g in _fontdata.encodings[name]]
        for name in ("StandardEncoding", "WinAnsiEncoding", "MacRomanEncoding")
    }
    (OUT / "encodings.json").write_text(json.dumps(encodings, indent=0))
    (OUT / "glyphlist.json").write_text(
        json.dumps({k: chr(v) for k, v in sorted(AGL2UV.items())}, ensure_ascii=False, indent=0)
    )
    widths = {}
    win = _fontdata.encodings["WinAnsiEncoding"]
    for font in ("Helvetica", "Times-Roman", "Courier"):
        table = _fontdata.widthsByFontGlyph[font]
        widths[font] = [table.get(g, 0) if g else 0 for g in win]
    (OUT / "widths.json").write_text(json.dumps(widths))


if __name__ == "__main__":
    main()
