"""Content-stream operators: tokenize, serialize, and replay the text state."""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field, replace
from decimal import Decimal

from phantomtok.errors import (
    DanglingOperands,
    PdfError,
    PdfSyntaxError,
    UnterminatedInlineImage,
)
from phantomtok.pdf.document import Document
from phantomtok.pdf.lexer import BRACE, KEYWORD, Lexer
from phantomtok.pdf.objects import Name, PdfValue, Ref, Stream, serialize_value

logger = logging.getLogger(__name__)

SHOW_OPERATORS = frozenset({"Tj", "TJ", "'", '"'})
# operators after which the next shown text starts at a new position
POSITIONING_OPERATORS = frozenset({"BT", "ET", "Td", "TD", "Tm", "T*", "'", '"'})

_EI = re.compile(rb"[\x00\t\n\x0c\r ]EI(?=[\x00\t\n\x0c\r ]|\Z)")
_VALUE_KEYWORDS = (b"true", b"false", b"null")


@dataclass(frozen=True)
class InlineImage:
    """Raw bytes of a BI ... ID ... EI block, kept opaque."""

    header: bytes
    data: bytes

    def to_bytes(self) -> bytes:
        return b"BI" + self.header + b"ID " + self.data + b" EI"


@dataclass
class ContentOp:
    operator: str
    operands: list = field(default_factory=list)

    @property
    def is_show(self) -> bool:
        return self.operator in SHOW_OPERATORS


def parse_content(data: bytes) -> list[ContentOp]:
    """Split a decoded content stream into operators with their operands."""
    return [op for op, _, _ in parse_content_spans(data)]


def parse_content_spans(data: bytes) -> list[tuple[ContentOp, int, int]]:
    """Like :func:`parse_content`, with the byte span each op occupies."""
    lexer = Lexer(data)
    ops: list[tuple[ContentOp, int, int]] = []
    operands: list[PdfValue] = []
    first_operand = None
    while True:
        tok = lexer.next_token()
        if tok is None:
            break
        kind, value, start = tok
        if kind == KEYWORD and value not in _VALUE_KEYWORDS:
            begin = start if first_operand is None else first_operand
            if value == b"BI":
                op = ContentOp("BI", [_read_inline_image(lexer, start)])
            else:
                op = ContentOp(value.decode("latin-1"), operands)
            ops.append((op, begin, lexer.pos))
            operands = []
            first_operand = None
            continue
        if kind == BRACE:
            raise PdfSyntaxError("unexpected brace in content stream", start)
        if first_operand is None:
            first_operand = start
        operands.append(lexer.read_value(tok))
    if operands:
        raise DanglingOperands(f"{len(operands)} operand(s) without an operator", first_operand)
    return ops


def _read_inline_image(lexer: Lexer, bi_start: int) -> InlineImage:
    data = lexer.data
    header_start = lexer.pos
    while True:
        tok = lexer.next_token()
        if tok is None:
            raise UnterminatedInlineImage("inline image without ID", bi_start)
        if tok[0] == KEYWORD and tok[1] == b"ID":
            header_end = tok[2]
            break
        lexer.read_value(tok)
    body_start = lexer.pos
    if body_start < len(data) and data[body_start] in b"\x00\t\n\x0c\r ":
        body_start += 1  # the single separator after ID
    m = _EI.search(data, body_start)
    if m is None:
        raise UnterminatedInlineImage("inline image without EI", bi_start)
    lexer.pos = m.end()
    return InlineImage(data[header_start:header_end], data[body_start : m.start()])


def serialize_op(op: ContentOp) -> bytes:
    if op.operator == "BI" and op.operands and isinstance(op.operands[0], InlineImage):
        return op.operands[0].to_bytes()
    parts = [serialize_value(v) for v in op.operands]
    parts.append(op.operator.encode("latin-1"))
    return b" ".join(parts)


def serialize_content(ops: list[ContentOp]) -> bytes:
    if not ops:
        return b""
    return b"\n".join(serialize_op(op) for op in ops) + b"\n"


# text state


@dataclass(frozen=True)
class TextState:
    font_name: Name | None = None
    font_size: int | Decimal = 0
    char_spacing: int | Decimal = 0
    word_spacing: int | Decimal = 0
    horiz_scale: int | Decimal = 100
    leading: int | Decimal = 0
    rise: int | Decimal = 0
    render_mode: int = 0
    fill_gray: float | None = 0.0
    fill_alpha: float = 1.0
    in_text_object: bool = False


@dataclass(frozen=True)
class TextRun:
    """One text-showing event, with the state in force when it was shown."""

    raw: bytes
    state: TextState
    font: dict | None
    op_index: int
    operator: str
    missing_font: bool = False
    break_before: bool = True
    form_path: tuple[str, ...] = ()


def _num(value, default=0):
    if isinstance(value, bool) or not isinstance(value, (int, float, Decimal)):
        return default
    return value


class TextStateMachine:
    """Replays the subset of the graphics state that decides text visibility."""

    def __init__(self, resources: dict, doc: Document | None, state: TextState | None = None):
        self.resources = resources
        self.doc = doc
        self.state = state or TextState()
        self.fill_space: str = "DeviceGray"
        self.stack: list[tuple[TextState, str]] = []

    def resolve(self, value):
        return self.doc.resolve(value) if self.doc is not None else value

    def lookup(self, category: str, name) -> PdfValue:
        table = self.resolve(self.resources.get(category))
        if not isinstance(table, dict):
            return None
        return self.resolve(table.get(name))

    def apply(self, op: ContentOp) -> None:
        """Update state for every operator except the show operators' glyph output."""
        s = self.state
        o = op.operator
        args = op.operands
        if o == "q":
            self.stack.append((s, self.fill_space))
        elif o == "Q":
            if self.stack:
                self.state, self.fill_space = self.stack.pop()
        elif o == "BT":
            self.state = replace(s, in_text_object=True)
        elif o == "ET":
            self.state = replace(s, in_text_object=False)
        elif o == "Tf" and len(args) >= 2:
            name = args[0] if isinstance(args[0], Name) else None
            self.state = replace(s, font_name=name, font_size=_num(args[1]))
        elif o == "Tc" and args:
            self.state = replace(s, char_spacing=_num(args[0]))
        elif o == "Tw" and args:
            self.state = replace(s, word_spacing=_num(args[0]))
        elif o == "Tz" and args:
            self.state = replace(s, horiz_scale=_num(args[0], 100))
        elif o == "TL" and args:
            self.state = replace(s, leading=_num(args[0]))
        elif o == "TD" and len(args) >= 2:
            self.state = replace(s, leading=-_num(args[1]))
        elif o == "Ts" and args:
            self.state = replace(s, rise=_num(args[0]))
        elif o == "Tr" and args:
            mode = _num(args[0])
            self.state = replace(s, render_mode=int(mode) if 0 <= mode <= 7 else s.render_mode)
        elif o == '"' and len(args) >= 3:
            self.state = replace(s, word_spacing=_num(args[0]), char_spacing=_num(args[1]))
        elif o == "g" and args:
            self.fill_space = "DeviceGray"
            self.state = replace(s, fill_gray=float(_num(args[0])))
        elif o in ("rg", "k"):
            self.fill_space = "DeviceRGB" if o == "rg" else "DeviceCMYK"
            self.state = replace(s, fill_gray=None)
        elif o == "cs" and args:
            space = self.resolve(args[0])
            self.fill_space = str(space) if isinstance(space, str) else "Other"
            self.state = replace(s, fill_gray=0.0 if self.fill_space in ("DeviceGray", "G", "CalGray") else None)
        elif o in ("sc", "scn"):
            if self.fill_space in ("DeviceGray", "G", "CalGray") and len(args) == 1:
                self.state = replace(s, fill_gray=float(_num(args[0])))
            else:
                self.state = replace(s, fill_gray=None)
        elif o == "gs" and args:
            gstate = self.lookup("ExtGState", args[0])
            if isinstance(gstate, dict) and "ca" in gstate:
                self.state = replace(s, fill_alpha=float(_num(self.resolve(gstate["ca"]), 1)))


def _shown_bytes(op: ContentOp) -> bytes:
    if op.operator == "TJ":
        arr = op.operands[0] if op.operands and isinstance(op.operands[0], list) else []
        return b"".join(bytes(x) for x in arr if isinstance(x, (bytes, bytearray)))
    if op.operands and isinstance(op.operands[-1], (bytes, bytearray)):
        return bytes(op.operands[-1])
    return b""


def scan_text_runs(
    ops: list[ContentOp],
    resources: dict,
    doc: Document | None = None,
    *,
    expand_forms: bool = False,
    _machine: TextStateMachine | None = None,
    _path: tuple[str, ...] = (),
    _active: frozenset = frozenset(),
    _outer_index: int | None = None,
) -> list[TextRun]:
    """Text runs of one content stream, in stream order.

    With ``expand_forms`` the runs of form XObjects painted by ``Do`` are
    spliced in at the Do position (each form at most once per path).
    """
    machine = _machine or TextStateMachine(resources, doc)
    runs: list[TextRun] = []
    pending_break = True
    for index, op in enumerate(ops):
        source_index = index if _outer_index is None else _outer_index
        o = op.operator
        if o in SHOW_OPERATORS:
            if o in ("'", '"'):
                pending_break = True
            machine.apply(op)
            state = machine.state
            font = machine.lookup("Font", state.font_name) if state.font_name is not None else None
            missing = not isinstance(font, dict)
            if missing:
                logger.debug("text shown without a resolvable font at op %d", source_index)
            runs.append(
                TextRun(
                    raw=_shown_bytes(op),
                    state=state,
                    font=font if isinstance(font, dict) else None,
                    op_index=source_index,
                    operator=o,
                    missing_font=missing,
                    break_before=pending_break,
                    form_path=_path,
                )
            )
            pending_break = False
            continue
        if o in POSITIONING_OPERATORS:
            pending_break = True
        if o == "Do" and expand_forms and op.operands and doc is not None:
            sub = _expand_form(op, machine, doc, _path, _active, source_index)
            if sub:
                if pending_break:
                    sub[0] = replace(sub[0], break_before=True)
                runs.extend(sub)
                pending_break = True
            continue
        machine.apply(op)
    return runs


def _expand_form(op, machine, doc, path, active, source_index) -> list[TextRun]:
    name = op.operands[0]
    ref = None
    table = machine.resolve(machine.resources.get("XObject"))
    if isinstance(table, dict):
        ref = table.get(name)
    form = doc.resolve(ref)
    if not isinstance(form, Stream) or form.get("Subtype") != "Form":
        return []
    key = ref if isinstance(ref, Ref) else id(form)
    if key in active:
        logger.warning("form XObject cycle at /%s", name)
        return []
    try:
        sub_ops = parse_content(doc.decode(form))
    except PdfError as exc:
        logger.warning("skipping unreadable form XObject /%s: %s", name, exc)
        return []
    sub_resources = doc.resolve(form.get("Resources"))
    if not isinstance(sub_resources, dict):
        sub_resources = machine.resources
    sub_machine = TextStateMachine(sub_resources, doc, machine.state)
    sub_machine.fill_space = machine.fill_space
    return scan_text_runs(
        sub_ops,
        sub_resources,
        doc,
        expand_forms=True,
        _machine=sub_machine,
        _path=path + (str(name),),
        _active=active | {key},
        _outer_index=source_index,
    )
