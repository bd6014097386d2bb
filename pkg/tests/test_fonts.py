from __future__ import annotations

from phantomtok.fonts import (
    REPLACEMENT,
    composite_font,
    decode_shown_bytes,
    encoding_vector,
    font_info,
    glyph_to_unicode,
    parse_cmap,
    simple_font,
)
from phantomtok.pdf import Name, Stream


def test_glyph_names():
    assert glyph_to_unicode("alpha") == "α"
    assert glyph_to_unicode("A") == "A"
    assert glyph_to_unicode("uni00410042") == "AB"
    assert glyph_to_unicode("u1F600") == "\U0001f600"
    assert glyph_to_unicode("f_i") == "fi"
    assert glyph_to_unicode("nosuchglyph") is None


def test_base_encodings_differ():
    assert encoding_vector("WinAnsiEncoding")[0x80] == "Euro"
    assert encoding_vector("MacRomanEncoding")[0x80] == "Adieresis"
    assert encoding_vector("StandardEncoding")[0x27] == "quoteright"


def test_differences_override_base():
    font = simple_font("WinAnsiEncoding", {65: "alpha"})
    assert decode_shown_bytes(font, b"AB") == ("αB", False)


def test_unmapped_code_becomes_replacement():
    font = simple_font("StandardEncoding")
    assert decode_shown_bytes(font, b"\x80") == (REPLACEMENT, False)


def test_tounicode_cmap_wins():
    cmap = b"""begincmap
2 beginbfchar
<01> <0048>
<02> <00690021>
endbfchar
1 beginbfrange
<10> <12> <0061>
endbfrange
1 beginbfrange
<20> <21> [<0058> <0059>]
endbfrange
endcmap"""
    table = parse_cmap(cmap)
    assert table == {1: "H", 2: "i!", 0x10: "a", 0x11: "b", 0x12: "c", 0x20: "X", 0x21: "Y"}
    font = font_info({"Subtype": Name("Type1"), "ToUnicode": Stream({}, cmap)})
    assert decode_shown_bytes(font, b"\x01\x02")[0] == "Hi!"


def test_composite_two_byte_codes():
    font = composite_font({0x0102: "Z"})
    assert decode_shown_bytes(font, b"\x01\x02") == ("Z", False)
    assert decode_shown_bytes(font, b"\x00\x05") == (REPLACEMENT, False)
    # an odd trailing byte is an incomplete code
    assert decode_shown_bytes(font, b"\x01\x02\x03") == ("Z" + REPLACEMENT, True)
