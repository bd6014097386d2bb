from __future__ import annotations

import json

import pytest

from phantomtok.cli import run
from phantomtok.extraction import extract_text
from phantomtok.pdf import parse_document


@pytest.fixture
def rendered(tmp_path):
    src = tmp_path / "in.txt"
    src.write_text("Justin Rose is not resting on his laurels.\n\nThe committee met on Tuesday.")
    pdf = tmp_path / "in.pdf"
    assert run(["render", "--in", str(src), "--out", str(pdf)]) == 0
    return pdf


def test_inject_and_views(rendered, tmp_path, capsys):
    out = tmp_path / "out.pdf"
    report = tmp_path / "report.jsonl"
    code = run(["inject", "--in", str(rendered), "--out", str(out), "--payload-text", "alpha beta",
                "--mode", "size0+tr3", "--report", str(report)])
    assert code == 0
    record = json.loads(report.read_text())
    assert record["words_inserted"] == record["gaps_total"] > 0
    capsys.readouterr()
    assert run(["extract", "--in", str(out), "--view", "human"]) == 0
    assert capsys.readouterr().out.strip() == extract_text(parse_document(rendered.read_bytes()), "human")


def test_no_overwrite_without_force(rendered, tmp_path):
    out = tmp_path / "out.pdf"
    out.write_bytes(b"keep")
    assert run(["inject", "--in", str(rendered), "--out", str(out), "--payload-text", "x"]) == 1
    assert out.read_bytes() == b"keep"
    assert run(["inject", "--in", str(rendered), "--out", str(out), "--payload-text", "x", "--force"]) == 0


def test_exit_codes(tmp_path, data_dir, capsys):
    assert run([]) == 1
    assert run(["inject", "--in", "x.pdf"]) == 1
    bad = tmp_path / "bad.pdf"
    bad.write_bytes(b"not a pdf")
    assert run(["extract", "--in", str(bad)]) == 2
    assert run(["extract", "--in", str(tmp_path / "missing.pdf")]) == 2
    capsys.readouterr()
    assert run(["extract", "--in", str(data_dir / "encrypted.pdf")]) == 2
    assert "ncrypt" in capsys.readouterr().err


def test_perturb_methods(rendered, tmp_path):
    out = tmp_path / "payload.txt"
    assert run(["perturb", "--method", "negation", "--in", str(rendered), "--out", str(out)]) == 0
    assert out.read_text().startswith("Justin Rose is resting on his laurels.")
    assert run(["perturb", "--method", "hallucination", "--in", str(rendered), "--out", str(tmp_path / "h")]) == 1
    assert run(["perturb", "--method", "hallucination", "--llm-stub", "fail", "--in", str(rendered),
                "--out", str(tmp_path / "h")]) == 3
    assert run(["perturb", "--method", "irrelevant", "--in", str(rendered), "--out", str(tmp_path / "i")]) == 1


def test_pipeline_self_verifies(rendered, tmp_path, capsys):
    out = tmp_path / "p.pdf"
    code = run(["pipeline", "--in", str(rendered), "--out", str(out), "--method", "hallucination",
                "--llm-stub", "echo:[stub] "])
    assert code == 0
    record = json.loads(capsys.readouterr().out)
    assert record["verified"] and record["method"] == "hallucination"
    assert "[stub]" in extract_text(parse_document(out.read_bytes()), "stream")


def test_inspect_and_eyesight(tmp_path, capsys):
    probe = tmp_path / "probe.pdf"
    assert run(["eyesight", "--out", str(probe)]) == 0
    capsys.readouterr()
    assert run(["inspect", "--in", str(probe), "--figure", str(tmp_path / "h.png")]) == 0
    lines = [json.loads(x) for x in capsys.readouterr().out.splitlines()]
    assert {x["text"] for x in lines} >= {"Size 0.0"}
    assert (tmp_path / "h.png").stat().st_size > 0


def test_score(tmp_path, capsys):
    cand, ref = tmp_path / "c.jsonl", tmp_path / "r.jsonl"
    cand.write_text('{"id": "1", "text": "the cat"}\n{"id": "2", "text": "a b"}\n')
    ref.write_text('{"id": "2", "text": "a b"}\n{"id": "1", "text": "the cat"}\n')
    assert run(["score", "--candidate", str(cand), "--reference", str(ref), "--jsonl", "--metrics", "bleu1,rougeL"]) == 0
    lines = [json.loads(x) for x in capsys.readouterr().out.splitlines()]
    assert lines[-1] == {"id": "mean", "pairs": 2, "bleu1": 1.0, "rougeL": {"precision": 1.0, "recall": 1.0, "f1": 1.0}}
    assert run(["score", "--candidate", str(cand), "--reference", str(ref), "--metrics", "nope"]) == 1


def test_figures_written_next_to_reports(rendered, tmp_path):
    inj_fig, score_fig = tmp_path / "inject.png", tmp_path / "scores.svg"
    assert run(["inject", "--in", str(rendered), "--out", str(tmp_path / "o.pdf"), "--payload-text", "a b",
                "--figure", str(inj_fig)]) == 0
    text = tmp_path / "t.txt"
    text.write_text("one two three")
    assert run(["score", "--candidate", str(text), "--reference", str(text), "--figure", str(score_fig)]) == 0
    assert inj_fig.read_bytes().startswith(b"\x89PNG")
    assert b"<svg" in score_fig.read_bytes()[:400]
