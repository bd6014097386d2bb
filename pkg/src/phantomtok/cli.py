"""Command-line entry point: ``phantomtok <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 malformed or missing input,
3 upstream LLM failure, 4 internal invariant violation.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from phantomtok import extraction, inject, metrics, perturb
from phantomtok.errors import (
    ExtractionError,
    InjectionError,
    LlmError,
    LlmRequired,
    PdfError,
    PerturbationError,
)
from phantomtok.eyesight import TextLayout, build_eyesight_pdf, build_text_pdf
from phantomtok.llm import EchoWithMarker, Fail, FixedResponse, LlmConfig
from phantomtok.pdf import Document, parse_document, write_document

logger = logging.getLogger("phantomtok")

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_LLM, EXIT_INVARIANT = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class InvariantViolation(Exception):
    pass


class StageError(Exception):
    """Wraps a failure with the pipeline stage and input that caused it."""

    def __init__(self, stage: str, source: str, cause: Exception):
        super().__init__(f"[{stage}] {source}: {cause}")
        self.stage = stage
        self.cause = cause


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# helpers


def _read_bytes(path: str, stage: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise StageError(stage, path, exc) from exc


def _load_pdf(path: str, stage: str) -> Document:
    data = _read_bytes(path, stage)
    try:
        return parse_document(data)
    except PdfError as exc:
        raise StageError(stage, path, exc) from exc


def _read_text(path: str, stage: str) -> str:
    data = _read_bytes(path, stage)
    if data.startswith(b"%PDF-"):
        doc = _load_pdf(path, stage)
        return _extract(doc, path, "human")
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise StageError(stage, path, exc) from exc


def _extract(doc: Document, source: str, view: str, strict: bool = False) -> str:
    try:
        return extraction.extract_text(doc, view, strict=strict)
    except (ExtractionError, PdfError) as exc:
        raise StageError("extract", source, exc) from exc


def _writable(path: str, force: bool) -> Path:
    out = Path(path)
    if out.exists() and not force:
        raise UsageError(f"{path} exists; pass --force to overwrite")
    return out


def _llm_config(args) -> LlmConfig | None:
    stub = None
    if getattr(args, "llm_stub", None):
        kind, _, value = args.llm_stub.partition(":")
        if kind == "echo":
            stub = EchoWithMarker(value)
        elif kind == "fixed":
            stub = FixedResponse(value)
        elif kind == "fail":
            stub = Fail()
        else:
            raise UsageError(f"unknown --llm-stub {args.llm_stub!r}; use echo:MARK, fixed:TEXT or fail")
    if stub is None and not getattr(args, "llm_endpoint", None):
        return None
    return LlmConfig(
        endpoint_url=args.llm_endpoint,
        model_name=args.llm_model or "",
        api_key_env=args.llm_key_env,
        temperature=args.llm_temperature,
        stub=stub,
    )


def _injection_config(args) -> inject.InjectionConfig:
    return inject.InjectionConfig(
        segment_chars=args.segment_chars,
        mode=inject.Mode(args.mode),
        fill_policy=inject.FillPolicy(args.fill),
    )


def _make_payload(args, text: str, source: str) -> str:
    try:
        method, variant = perturb.parse_method(args.method)
    except ValueError as exc:
        raise UsageError(f"unknown method {args.method!r}") from exc
    try:
        spec = perturb.PerturbationSpec(method, variant, args.seed, _llm_config(args))
    except LlmRequired as exc:
        raise UsageError(f"{exc}; pass --llm-endpoint/--llm-model or --llm-stub") from exc
    corpus = None
    if method is perturb.Method.IRRELEVANT:
        if not args.corpus or args.id is None:
            raise UsageError("method irrelevant needs --corpus and --id")
        raw = _read_bytes(args.corpus, "perturb")
        try:
            corpus = perturb.read_corpus(raw.decode("utf-8").splitlines())
        except (ValueError, KeyError) as exc:
            raise StageError("perturb", args.corpus, exc) from exc
    try:
        return perturb.perturb(text, spec, corpus=corpus, target_id=args.id)
    except LlmError:
        raise
    except (PerturbationError, KeyError, ValueError) as exc:
        raise StageError("perturb", source, exc) from exc


def _emit(lines: list[str], report_path: str | None, force: bool) -> None:
    text = "\n".join(lines) + ("\n" if lines else "")
    sys.stdout.write(text)
    if report_path:
        _writable(report_path, force).write_text(text, encoding="utf-8")


def _do_inject(doc: Document, payload: str, args, source: str):
    try:
        return inject.inject_payload(doc, payload, _injection_config(args), compress=args.compress)
    except (InjectionError, PdfError) as exc:
        raise StageError("inject", source, exc) from exc


# subcommands


def cmd_inject(args) -> int:
    out = _writable(args.out, args.force)
    if args.payload is None and args.payload_text is None:
        raise UsageError("inject needs --payload FILE or --payload-text TEXT")
    payload = args.payload_text
    if payload is None:
        payload = _read_bytes(args.payload, "inject").decode("utf-8")
    doc = _load_pdf(args.inp, "inject")
    new_doc, report = _do_inject(doc, payload, args, args.inp)
    out.write_bytes(write_document(new_doc, compress=args.compress))
    _emit([json.dumps(report.to_record())], args.report, args.force)
    if args.figure:
        from phantomtok.plots import plot_injection

        plot_injection(report, _writable(args.figure, args.force))
    return EXIT_OK


def cmd_perturb(args) -> int:
    out = _writable(args.out, args.force)
    text = _read_text(args.inp, "perturb")
    payload = _make_payload(args, text, args.inp)
    out.write_text(payload, encoding="utf-8")
    return EXIT_OK


def cmd_extract(args) -> int:
    doc = _load_pdf(args.inp, "extract")
    sys.stdout.write(_extract(doc, args.inp, args.view, args.strict_white) + "\n")
    return EXIT_OK


def cmd_inspect(args) -> int:
    doc = _load_pdf(args.inp, "inspect")
    try:
        reports = extraction.list_hidden_runs(doc)
    except (ExtractionError, PdfError) as exc:
        raise StageError("inspect", args.inp, exc) from exc
    _emit([r.to_line() for r in reports], args.report, args.force)
    if args.figure:
        from phantomtok.plots import plot_hidden_runs

        plot_hidden_runs(reports, _writable(args.figure, args.force))
    return EXIT_OK


def cmd_eyesight(args) -> int:
    out = _writable(args.out, args.force)
    out.write_bytes(write_document(build_eyesight_pdf()))
    return EXIT_OK


def cmd_render(args) -> int:
    out = _writable(args.out, args.force)
    text = _read_bytes(args.inp, "render").decode("utf-8")
    paragraphs = [p for p in (" ".join(block.split()) for block in text.split("\n\n")) if p]
    if not paragraphs:
        raise StageError("render", args.inp, ValueError("no text to render"))
    try:
        layout = TextLayout(
            page_size=(args.page_width, args.page_height),
            margin=args.margin,
            base_font_size=args.font_size,
            leading=args.leading if args.leading is not None else args.font_size * 1.2,
            font=args.font,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    out.write_bytes(write_document(build_text_pdf(paragraphs, layout), compress=args.compress))
    return EXIT_OK


def _pairs(args) -> list[tuple[str | None, str, str]]:
    cand = _read_bytes(args.candidate, "score").decode("utf-8")
    ref = _read_bytes(args.reference, "score").decode("utf-8")
    if not args.jsonl:
        return [(None, cand, ref)]
    try:
        cands = dict(perturb.read_corpus(cand.splitlines()))
        refs = dict(perturb.read_corpus(ref.splitlines()))
    except (ValueError, KeyError) as exc:
        raise StageError("score", args.candidate, exc) from exc
    missing = sorted(set(cands) ^ set(refs))
    if missing:
        raise StageError("score", args.candidate, ValueError(f"unpaired ids: {missing[:5]}"))
    return [(i, cands[i], refs[i]) for i in cands]


def cmd_score(args) -> int:
    names = tuple(m.strip() for m in args.metrics.split(",") if m.strip())
    unknown = [m for m in names if m not in metrics.METRIC_NAMES]
    if unknown or not names:
        raise UsageError(f"unknown metric(s) {unknown}; choose from {', '.join(metrics.METRIC_NAMES)}")
    reports = [metrics.score(c, r, smoothing=args.smoothing, pair_id=i) for i, c, r in _pairs(args)]
    mean = metrics.mean_report(reports)
    lines = [r.to_line(names) for r in reports]
    lines.append(json.dumps({k: v for k, v in mean.items() if k in ("id", "pairs") + names}))
    _emit(lines, args.report, args.force)
    if args.figure:
        from phantomtok.plots import plot_scores

        plot_scores(mean, _writable(args.figure, args.force), names)
    return EXIT_OK


def cmd_pipeline(args) -> int:
    out = _writable(args.out, args.force)
    doc = _load_pdf(args.inp, "pipeline")
    human_before = _extract(doc, args.inp, "human")
    stream_before = _extract(doc, args.inp, "stream")
    payload = _make_payload(args, human_before, args.inp)
    new_doc, report = _do_inject(doc, payload, args, args.inp)
    data = write_document(new_doc, compress=args.compress)

    written = parse_document(data)
    human_after = _extract(written, args.out, "human")
    stream_after = _extract(written, args.out, "stream")
    if human_after != human_before:
        raise InvariantViolation("human view changed after injection")
    if not extraction.is_subsequence(stream_before, stream_after):
        raise InvariantViolation("original stream text is not a subsequence of the perturbed stream text")

    out.write_bytes(data)
    record = report.to_record()
    record["method"] = args.method
    record["verified"] = True
    _emit([json.dumps(record)], args.report, args.force)
    return EXIT_OK


# parser


def _add_injection_flags(p) -> None:
    p.add_argument("--segment-chars", type=int, default=2, metavar="N")
    p.add_argument("--mode", choices=[m.value for m in inject.Mode], default="size0")
    p.add_argument("--fill", choices=[f.value for f in inject.FillPolicy], default="cycle")
    p.add_argument("--compress", action="store_true", help="Flate-encode unfiltered streams on output")


def _add_perturb_flags(p) -> None:
    p.add_argument("--method", required=True, help="irrelevant, meta-instruction, negation, hallucination, c1..s3")
    p.add_argument("--corpus", help="JSON-lines corpus of {id, text} records")
    p.add_argument("--id", help="corpus id of the input text")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--llm-endpoint")
    p.add_argument("--llm-model")
    p.add_argument("--llm-key-env", default="TRAPDOC_LLM_API_KEY")
    p.add_argument("--llm-temperature", type=float, default=1.0)
    p.add_argument("--llm-stub", help="offline stub: echo:MARKER, fixed:TEXT or fail")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="phantomtok", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("inject", help="hide payload words in a PDF")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--payload", help="UTF-8 payload file")
    p.add_argument("--payload-text")
    _add_injection_flags(p)
    p.add_argument("--report")
    p.add_argument("--figure", help="write a per-page chart (PNG/PDF/SVG)")
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_inject)

    p = sub.add_parser("perturb", help="generate a payload from text")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    _add_perturb_flags(p)
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_perturb)

    p = sub.add_parser("extract", help="print the stream or human view")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--view", choices=["stream", "human"], default="stream")
    p.add_argument("--strict-white", action="store_true", help="drop white or transparent text from the human view")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("inspect", help="list hidden text runs")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--report")
    p.add_argument("--figure")
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("eyesight", help="write the reader probe PDF")
    p.add_argument("--out", required=True)
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_eyesight)

    p = sub.add_parser("render", help="typeset a text file as PDF")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--font", default="Times-Roman")
    p.add_argument("--font-size", type=float, default=10)
    p.add_argument("--leading", type=float)
    p.add_argument("--margin", type=float, default=72)
    p.add_argument("--page-width", type=float, default=612)
    p.add_argument("--page-height", type=float, default=792)
    p.add_argument("--compress", action="store_true")
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("score", help="BLEU/ROUGE between candidate and reference")
    p.add_argument("--candidate", required=True)
    p.add_argument("--reference", required=True)
    p.add_argument("--metrics", default=",".join(metrics.METRIC_NAMES))
    p.add_argument("--jsonl", action="store_true", help="inputs are {id, text} records paired by id")
    p.add_argument("--smoothing", action="store_true")
    p.add_argument("--report")
    p.add_argument("--figure")
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("pipeline", help="extract, perturb and inject in one verified pass")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    _add_perturb_flags(p)
    _add_injection_flags(p)
    p.add_argument("--report")
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_pipeline)
    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except StageError as exc:
        if isinstance(exc.cause, LlmError):
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_LLM
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except LlmError as exc:
        print(f"error: [llm] {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_LLM
    except InvariantViolation as exc:
        print(f"error: [verify] {args.out}: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except Exception as exc:  # noqa: BLE001
        logger.exception("internal error in %s", args.command)
        print(f"error: [{args.command}] internal failure: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
