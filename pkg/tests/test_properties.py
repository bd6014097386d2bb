"""Property tests for the invariants the rest of the suite relies on."""
from __future__ import annotations

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from phantomtok.content import ContentOp, parse_content, serialize_content
from phantomtok.extraction import extract_text, is_subsequence
from phantomtok.inject import InjectionConfig, inject_payload, split_segments
from phantomtok.metrics import score
from phantomtok.pdf import Name, parse_document, serialize_value, write_document
from phantomtok.pdf.lexer import Lexer
from phantomtok.perturb import gen_irrelevant, gen_meta_instruction, gen_promptattack

from conftest import one_page

printable = st.text(st.characters(min_codepoint=32, max_codepoint=126), min_size=1, max_size=40)
words = st.lists(st.text("abcdefghij", min_size=1, max_size=6), min_size=1, max_size=6)

pdf_values = st.recursive(
    st.none() | st.booleans() | st.integers(-10**9, 10**9) | st.binary(max_size=20)
    | st.text("abcXYZ #/()", min_size=1, max_size=8).map(Name),
    lambda inner: st.lists(inner, max_size=4) | st.dictionaries(st.text("abcK", min_size=1, max_size=4), inner, max_size=4),
    max_leaves=12,
)


@given(pdf_values)
def test_value_serialization_roundtrip(value):
    assert Lexer(serialize_value(value)).read_object() == value


@given(st.lists(st.tuples(st.sampled_from(["Tj", "Tf", "cm", "TJ", "Td", "q"]), st.lists(pdf_values, max_size=3)), max_size=8))
def test_content_roundtrip(raw_ops):
    ops = [ContentOp(o, args) for o, args in raw_ops]
    assert parse_content(serialize_content(ops)) == ops


@given(st.binary(max_size=30), st.integers(1, 5), st.sampled_from([1, 2]))
def test_split_segments_concatenates_back(raw, n, unit):
    segs = split_segments(raw, n, unit)
    assert b"".join(segs) == raw
    assert all(len(s) <= n * unit + 1 for s in segs)


@settings(max_examples=40, suppress_health_check=[HealthCheck.too_slow], deadline=None)
@given(st.lists(printable, min_size=1, max_size=4), words, st.integers(1, 4), st.sampled_from(["size0", "size0+tr3"]),
       st.sampled_from(["cycle", "single"]))
def test_injection_preserves_views(strings, payload, n, mode, fill):
    body = b"BT /F1 12 Tf " + b" 0 -14 Td ".join(serialize_value(s.encode()) + b" Tj" for s in strings) + b" ET"
    doc = one_page(body)
    new, report = inject_payload(doc, payload, InjectionConfig(segment_chars=n, mode=mode, fill_policy=fill))
    again = parse_document(write_document(new))
    assert extract_text(again, "human") == extract_text(doc, "human")
    assert is_subsequence(extract_text(doc, "stream"), extract_text(again, "stream"))
    expected = report.gaps_total if fill == "cycle" else min(report.gaps_total, len(payload))
    assert report.words_inserted == expected


@given(st.lists(st.text("abc", min_size=1, max_size=3), min_size=2, max_size=8, unique=True), st.integers(0, 2**32))
def test_irrelevant_never_returns_target(ids, seed):
    corpus = [(i, f"text-{i}") for i in ids]
    for i in ids:
        assert gen_irrelevant(corpus, i, seed) != f"text-{i}"


@given(printable)
def test_meta_contains_original(text):
    assert text in gen_meta_instruction(text)


sentence = st.text(st.characters(min_codepoint=33, max_codepoint=126, blacklist_characters=".?!"), min_size=1, max_size=30)


@given(st.lists(sentence, min_size=1, max_size=5).map(" ".join), st.integers(0, 100))
def test_suffix_variants_keep_prefix(text, seed):
    for variant in ("s1", "c3"):
        out = gen_promptattack(text, variant, seed)
        assert out.startswith(text) and len(out) > len(text)
        assert gen_promptattack(text, variant, seed) == out


@given(printable, printable)
def test_metric_bounds(a, b):
    s = score(a, b)
    for name in ("bleu1", "bleu2", "rouge1", "rouge2", "rougeL"):
        assert 0.0 <= s.value(name) <= 1.0 + 1e-12
    assert score(a, a).rougeL.f1 in (0.0, 1.0)
