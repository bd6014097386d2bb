"""Phantom-token injection.

Every text-showing operator is split into segments of ``segment_chars``
characters and one payload word is shown at font size 0 in each gap. Size-0
glyphs have zero advance, and character/word spacing is zeroed around them, so
the visible glyphs keep their exact positions.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from itertools import cycle

from phantomtok.content import ContentOp, TextRun, parse_content_spans, scan_text_runs, serialize_op
from phantomtok.errors import EmptyPayload, EncryptedDocument
from phantomtok.pdf.document import Document, ObjectId
from phantomtok.pdf.objects import HexString, Name, Ref, Stream, format_string
from phantomtok.pdf.writer import write_document
from phantomtok.perturb import tokenize_payload

logger = logging.getLogger(__name__)

DEFAULT_PAYLOAD_FONT = "PhantomF"
PAYLOAD_BASE_FONT = "Helvetica"
_IDENTITY_CMAPS = ("Identity-H", "Identity-V")


class Mode(enum.Enum):
    SIZE_ZERO = "size0"
    SIZE_ZERO_TR3 = "size0+tr3"


class FillPolicy(enum.Enum):
    CYCLE = "cycle"
    SINGLE_PASS = "single"


@dataclass(frozen=True)
class InjectionConfig:
    segment_chars: int = 2
    mode: Mode = Mode.SIZE_ZERO
    fill_policy: FillPolicy = FillPolicy.CYCLE
    payload_font_name: str = DEFAULT_PAYLOAD_FONT
    skip_composite_unknown: bool = True
    rng_seed: int = 0  # unused: injection is deterministic

    def __post_init__(self):
        if self.segment_chars < 1:
            raise ValueError("segment_chars must be >= 1")
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "fill_policy", FillPolicy(self.fill_policy))


@dataclass(frozen=True)
class Insertion:
    page: int
    op_index: int
    kind: str  # "intra" (inside one show op) or "boundary" (between show ops)
    word: str
    byte_count: int


@dataclass(frozen=True)
class PageStats:
    page: int
    runs_rewritten: int
    words_inserted: int


@dataclass
class InjectionReport:
    gaps_total: int = 0
    words_inserted: int = 0
    payload_words: int = 0
    payload_exhausted: bool = False
    bytes_before: int = 0
    bytes_after: int = 0
    per_page: list[PageStats] = field(default_factory=list)
    insertions: list[Insertion] = field(default_factory=list)

    @property
    def inserted_bytes(self) -> int:
        return sum(i.byte_count for i in self.insertions)

    def gap_kinds(self) -> dict[str, int]:
        counts = {"intra": 0, "boundary": 0}
        for item in self.insertions:
            counts[item.kind] += 1
        return counts

    def to_record(self) -> dict:
        return {
            "gaps_total": self.gaps_total,
            "words_inserted": self.words_inserted,
            "payload_words": self.payload_words,
            "payload_exhausted": self.payload_exhausted,
            "bytes_before": self.bytes_before,
            "bytes_after": self.bytes_after,
            "inserted_bytes": self.inserted_bytes,
            "gap_kinds": self.gap_kinds(),
            "per_page": [
                {"page": p.page, "runs_rewritten": p.runs_rewritten, "words_inserted": p.words_inserted}
                for p in self.per_page
            ],
        }


def split_segments(raw: bytes, n: int, code_unit: int = 1) -> list[bytes]:
    """Cut ``raw`` into pieces of ``n`` codes; the last piece may be shorter.

    With 2-byte codes an odd trailing byte stays on the final piece.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    step = n * code_unit
    segments = [raw[i : i + step] for i in range(0, len(raw), step)]
    if code_unit == 2 and len(segments) > 1 and len(segments[-1]) == 1:
        tail = segments.pop()
        segments[-1] += tail
    return segments


def encode_payload_word(word: str) -> bytes:
    """WinAnsi bytes of a phantom word, padded with a space on both sides."""
    return (" " + word + " ").encode("cp1252", errors="replace")


# planning


@dataclass
class _OpPlan:
    index: int
    start: int
    end: int
    chunks: list[ContentOp]
    run: TextRun
    boundary: bool = False

    @property
    def gaps(self) -> int:
        return len(self.chunks) - 1 + int(self.boundary)


def _split_op(op: ContentOp, n: int, unit: int) -> list[ContentOp]:
    """Visible pieces of a show op; their concatenation shows the same glyphs."""
    o = op.operator
    if o == "TJ":
        chunks: list[list] = []
        prefix: list = []
        for item in op.operands[0]:
            if isinstance(item, (bytes, bytearray)) and item:
                for seg in _split_like(item, n, unit):
                    chunks.append(prefix + [seg])
                    prefix = []
            elif chunks:
                chunks[-1].append(item)
            else:
                prefix.append(item)
        if not chunks:
            return [op]
        chunks[-1].extend(prefix)
        return [ContentOp("TJ", [c]) for c in chunks]
    text = op.operands[-1]
    if not isinstance(text, (bytes, bytearray)) or not text:
        return [op]
    segs = _split_like(text, n, unit)
    first = ContentOp(o, list(op.operands[:-1]) + [segs[0]])
    return [first] + [ContentOp("Tj", [s]) for s in segs[1:]]


def _split_like(text: bytes, n: int, unit: int) -> list[bytes]:
    # keep hex strings in hex form
    segs = split_segments(bytes(text), n, unit)
    return [HexString(s) for s in segs] if isinstance(text, HexString) else segs


def _code_unit(run: TextRun, doc: Document, skip_composite_unknown: bool) -> int | None:
    if run.font is None:
        return None
    if run.font.get("Subtype") != "Type0":
        return 1
    encoding = doc.resolve(run.font.get("Encoding"))
    if skip_composite_unknown and encoding not in _IDENTITY_CMAPS:
        return None
    return 2


def _plan_page(doc: Document, page_id: ObjectId, data: bytes, config: InjectionConfig):
    spans = parse_content_spans(data)
    ops = [op for op, _, _ in spans]
    runs = scan_text_runs(ops, doc.page_resources(page_id), doc)
    by_index = {run.op_index: run for run in runs}
    plans: list[_OpPlan] = []
    last_in_text: _OpPlan | None = None
    for index, (op, start, end) in enumerate(spans):
        if op.operator in ("BT", "ET"):
            last_in_text = None
            continue
        run = by_index.get(index)
        if run is None:
            continue
        unit = _code_unit(run, doc, config.skip_composite_unknown)
        if last_in_text is not None:
            last_in_text.boundary = True
            last_in_text = None
        if unit is None or run.state.font_name is None or not run.state.in_text_object:
            continue
        plan = _OpPlan(index, start, end, _split_op(op, config.segment_chars, unit), run)
        plans.append(plan)
        last_in_text = plan
    return plans


# emission


def _phantom_ops(state, font_name: str, mode: Mode) -> tuple[list[ContentOp], list[ContentOp]]:
    """Operators emitted before and after the hidden ``(word) Tj``."""
    before = [ContentOp("Tf", [Name(font_name), 0])]
    after = [ContentOp("Tf", [state.font_name, state.font_size])]
    if state.char_spacing != 0:
        before.append(ContentOp("Tc", [0]))
        after.append(ContentOp("Tc", [state.char_spacing]))
    if state.word_spacing != 0:
        before.append(ContentOp("Tw", [0]))
        after.append(ContentOp("Tw", [state.word_spacing]))
    if mode is Mode.SIZE_ZERO_TR3 and state.render_mode != 3:
        before.append(ContentOp("Tr", [3]))
        after.append(ContentOp("Tr", [state.render_mode]))
    return before, after


def _phantom_frame(state, font_name: str, mode: Mode) -> tuple[bytes, bytes]:
    # serialized once per run; only the word differs between its gaps
    before, after = _phantom_ops(state, font_name, mode)
    head = b"".join(serialize_op(op) + b"\n" for op in before)
    tail = b" Tj" + b"".join(b"\n" + serialize_op(op) for op in after)
    return head, tail


def _payload_font_key(fonts: dict, wanted: str, font_ref: Ref) -> Name:
    candidate, suffix = wanted, 0
    while candidate in fonts and fonts[candidate] != font_ref:
        suffix += 1
        candidate = f"{wanted}{suffix}"
    return Name(candidate)


def inject_payload(
    doc: Document,
    payload: str | list[str],
    config: InjectionConfig | None = None,
    *,
    compress: bool = False,
) -> tuple[Document, InjectionReport]:
    """Return a copy of ``doc`` with phantom words from ``payload`` interleaved.

    ``payload`` is text (split on whitespace) or an already tokenized list.
    """
    config = config or InjectionConfig()
    words = tokenize_payload(payload) if isinstance(payload, str) else [w for w in payload if w.strip()]
    if not words:
        raise EmptyPayload("payload has no words")
    if "Encrypt" in doc.trailer:
        raise EncryptedDocument("document is encrypted")

    report = InjectionReport(payload_words=len(words))
    report.bytes_before = len(write_document(doc, compress=compress))

    page_data: list[bytes] = []
    page_plans: list[list[_OpPlan]] = []
    for page_id in doc.page_order:
        data = doc.page_content(page_id)
        plans = _plan_page(doc, page_id, data, config)
        page_data.append(data)
        page_plans.append(plans)
        report.gaps_total += sum(p.gaps for p in plans)

    if config.fill_policy is FillPolicy.CYCLE:
        supply = cycle(words)
        budget = report.gaps_total
    else:
        supply = iter(words)
        budget = min(report.gaps_total, len(words))

    font_num = doc.next_object_number()
    font_ref = Ref(font_num, 0)
    updates: dict[ObjectId, object] = {}
    used_font = False
    remaining = budget
    for page_index, (page_id, data, plans) in enumerate(zip(doc.page_order, page_data, page_plans)):
        if remaining <= 0:
            report.per_page.append(PageStats(page_index, 0, 0))
            continue
        page = doc.objects[page_id]
        resources = dict(doc.page_resources(page_id))
        fonts = dict(doc.resolve(resources.get("Font")) or {})
        key = _payload_font_key(fonts, config.payload_font_name, font_ref)

        pieces: list[bytes] = []
        cursor = 0
        runs_rewritten = words_here = 0
        for plan in plans:
            if remaining <= 0:
                break
            state = plan.run.state
            head, tail = _phantom_frame(state, key, config.mode)
            out: list[bytes] = []
            groups: list[tuple[str, int, str]] = []
            for i, chunk in enumerate(plan.chunks):
                out.append(serialize_op(chunk))
                kind = "intra" if i < len(plan.chunks) - 1 else ("boundary" if plan.boundary else None)
                if kind is None or remaining <= 0:
                    continue
                word = next(supply)
                remaining -= 1
                group = head + format_string(encode_payload_word(word)) + tail
                out.append(group)
                groups.append((kind, len(group) + 1, word))
            if not groups:
                continue
            replacement = b"\n".join(out)
            pieces.append(data[cursor : plan.start])
            pieces.append(replacement)
            cursor = plan.end
            delta = len(replacement) - (plan.end - plan.start)
            overhead = delta - sum(g[1] for g in groups)
            share, extra = divmod(overhead, len(groups))
            for j, (kind, size, word) in enumerate(groups):
                report.insertions.append(
                    Insertion(page_index, plan.index, kind, word, size + share + (extra if j == 0 else 0))
                )
            runs_rewritten += 1
            words_here += len(groups)
        report.per_page.append(PageStats(page_index, runs_rewritten, words_here))
        if not words_here:
            continue
        pieces.append(data[cursor:])
        used_font = True
        fonts[key] = font_ref
        resources["Font"] = fonts
        content_num = font_num + 1 + page_index
        new_page = dict(page)
        new_page["Resources"] = resources
        new_page["Contents"] = Ref(content_num, 0)
        updates[page_id] = new_page
        body = b"".join(pieces)
        updates[(content_num, 0)] = Stream({"Length": len(body)}, body)

    report.words_inserted = len(report.insertions)
    if config.fill_policy is FillPolicy.SINGLE_PASS:
        report.payload_exhausted = report.words_inserted >= len(words)
    if not used_font:
        if report.gaps_total == 0:
            logger.warning("no text found to inject into")
        report.bytes_after = report.bytes_before
        return doc, report

    updates[(font_num, 0)] = {
        "Type": Name("Font"),
        "Subtype": Name("Type1"),
        "BaseFont": Name(PAYLOAD_BASE_FONT),
        "Encoding": Name("WinAnsiEncoding"),
    }
    new_doc = doc.with_objects(updates)
    new_doc = _drop_orphaned_contents(doc, new_doc, updates)
    report.bytes_after = len(write_document(new_doc, compress=compress))
    return new_doc, report


def _drop_orphaned_contents(old: Document, new: Document, updates) -> Document:
    """Remove replaced content streams that nothing references any more."""
    candidates: set[ObjectId] = set()
    for page_id in old.page_order:
        if page_id not in updates:
            continue
        contents = old.objects[page_id].get("Contents")
        refs = contents if isinstance(contents, list) else [contents]
        if isinstance(contents, Ref):
            arr = old.resolve(contents)
            if isinstance(arr, list):
                refs = refs + arr
        candidates.update((r.num, r.gen) for r in refs if isinstance(r, Ref))
    if not candidates:
        return new
    live = {(r.num, r.gen) for r in new.iter_refs()}
    dead = candidates - live
    if not dead:
        return new
    objects = {k: v for k, v in new.objects.items() if k not in dead}
    return Document(new.version, objects, new.trailer, list(new.page_order))
