from __future__ import annotations

from decimal import Decimal

import pytest

from phantomtok.content import (
    ContentOp,
    InlineImage,
    TextStateMachine,
    parse_content,
    parse_content_spans,
    scan_text_runs,
    serialize_content,
)
from phantomtok.errors import DanglingOperands, UnbalancedString, UnterminatedInlineImage
from phantomtok.eyesight import standard_font
from phantomtok.pdf import Name, Ref, Stream

from conftest import one_page


def test_parse_basic_ops():
    ops = parse_content(b"BT /F1 12 Tf 72 700 Td [(Ju) -120.5 (stin)] TJ ET")
    assert [op.operator for op in ops] == ["BT", "Tf", "Td", "TJ", "ET"]
    assert ops[1].operands == [Name("F1"), 12]
    assert ops[3].operands == [[b"Ju", Decimal("-120.5"), b"stin"]]


def test_spans_cover_operands():
    data = b"q 1 0 0 1 5 5 cm (x) Tj Q"
    spans = parse_content_spans(data)
    assert [data[s:e] for _, s, e in spans] == [b"q", b"1 0 0 1 5 5 cm", b"(x) Tj", b"Q"]


def test_inline_image_is_opaque():
    data = b"q BI /W 2 /H 1 /BPC 8 /CS /G ID \x00EI\xff EI Q"
    ops = parse_content(data)
    assert [op.operator for op in ops] == ["q", "BI", "Q"]
    image = ops[1].operands[0]
    assert isinstance(image, InlineImage)
    assert image.data == b"\x00EI\xff"
    assert parse_content(serialize_content(ops)) == ops


def test_roundtrip_keeps_exact_kerning():
    ops = parse_content(b"[(A) -0.000001 (B) 33.3333333] TJ")
    assert parse_content(serialize_content(ops)) == ops
    assert b"-0.000001" in serialize_content(ops)


@pytest.mark.parametrize(
    "data, error",
    [(b"(abc Tj", UnbalancedString), (b"1 2", DanglingOperands), (b"BI /W 1 ID xx", UnterminatedInlineImage)],
)
def test_syntax_errors_carry_offsets(data, error):
    with pytest.raises(error) as info:
        parse_content(data)
    assert info.value.offset >= 0


def test_state_machine_q_stack_and_text_state():
    m = TextStateMachine({}, None)
    for op in parse_content(b"BT /F1 9 Tf 2 Tc 3 Tw q 0 Tf 3 Tr 0.5 g Q"):
        m.apply(op)
    s = m.state
    assert (s.font_name, s.font_size, s.char_spacing, s.word_spacing, s.render_mode, s.fill_gray) == ("F1", 9, 2, 3, 0, 0.0)
    assert s.in_text_object


def test_quote_operators_set_spacing():
    m = TextStateMachine({}, None)
    m.apply(ContentOp('"', [4, 1, b"x"]))
    assert (m.state.word_spacing, m.state.char_spacing) == (4, 1)


def test_extgstate_alpha():
    res = {"ExtGState": {"G0": {"ca": Decimal("0.25")}}}
    m = TextStateMachine(res, None)
    m.apply(ContentOp("gs", [Name("G0")]))
    assert m.state.fill_alpha == 0.25


def test_scan_text_runs_records_state_and_breaks():
    ops = parse_content(b"BT /F1 10 Tf (a) Tj (b) Tj 0 -12 Td (c) Tj /F1 0 Tf (d) Tj ET")
    runs = scan_text_runs(ops, {"Font": {"F1": standard_font("Helvetica")}})
    assert [r.raw for r in runs] == [b"a", b"b", b"c", b"d"]
    assert [r.break_before for r in runs] == [True, False, True, False]
    assert [r.state.font_size for r in runs] == [10, 10, 10, 0]
    assert runs[0].font["BaseFont"] == "Helvetica"


def test_missing_font_is_flagged():
    runs = scan_text_runs(parse_content(b"BT /Nope 10 Tf (x) Tj ET"), {})
    assert runs[0].missing_font and runs[0].font is None


def test_form_xobjects_expand_once_per_path():
    form = Stream({"Type": Name("XObject"), "Subtype": Name("Form"), "Resources": {"XObject": {"X": Ref(9, 0)}}},
                  b"BT /F1 10 Tf (inner) Tj ET /X Do")
    doc = one_page(b"/X Do", extra_resources={"XObject": {"X": Ref(9, 0)}})
    doc = doc.with_objects({(9, 0): form})
    res = doc.page_resources(doc.page_order[0])
    runs = scan_text_runs(parse_content(b"(pre) Tj /X Do"), res, doc, expand_forms=True)
    assert [r.raw for r in runs] == [b"pre", b"inner"]
    assert runs[1].form_path == ("X",)
