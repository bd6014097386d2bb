from __future__ import annotations

import math

import pytest

from phantomtok.metrics import (
    PRF,
    bleu,
    lcs_length,
    mean_report,
    rouge_l,
    rouge_n,
    score,
    tokenize_for_metrics,
)


def prf(p, r):
    return (p, r, 0.0 if p + r == 0 else 2 * p * r / (p + r))


# Hand-computed: (candidate, reference, bleu1, bleu2, rouge1 (p, r), rouge2 (p, r), rougeL (p, r))
TABLE = [
    ("the cat sat on the mat", "the cat is on the mat", 5 / 6, math.sqrt(1 / 2), (5 / 6, 5 / 6), (3 / 5, 3 / 5), (5 / 6, 5 / 6)),
    ("the cat", "the cat sat on the mat", math.exp(-2), math.exp(-2), (1, 1 / 3), (1, 1 / 5), (1, 1 / 3)),
    ("a b c d", "a b c d", 1, 1, (1, 1), (1, 1), (1, 1)),
    ("a b c", "x y z", 0, 0, (0, 0), (0, 0), (0, 0)),
    ("the the the the", "the cat", 1 / 4, 0, (1 / 4, 1 / 2), (0, 0), (1 / 4, 1 / 2)),
    ("Hello, World!", "hello world", 1, 1, (1, 1), (1, 1), (1, 1)),
    ("b a", "a b", 1, 0, (1, 1), (0, 0), (1 / 2, 1 / 2)),
    ("a b c d e", "a c e", 3 / 5, 0, (3 / 5, 1), (0, 0), (3 / 5, 1)),
    ("a b c", "a b c d e f", math.exp(-1), math.exp(-1), (1, 1 / 2), (1, 2 / 5), (1, 1 / 2)),
    ("a b a b", "a b b a", 1, math.sqrt(2 / 3), (1, 1), (2 / 3, 2 / 3), (3 / 4, 3 / 4)),
]


@pytest.mark.parametrize("cand, ref, b1, b2, r1, r2, rl", TABLE)
def test_frozen_table(cand, ref, b1, b2, r1, r2, rl):
    s = score(cand, ref)
    assert s.bleu1 == pytest.approx(b1, abs=1e-9)
    assert s.bleu2 == pytest.approx(b2, abs=1e-9)
    assert tuple(s.rouge1) == pytest.approx(prf(*r1), abs=1e-9)
    assert tuple(s.rouge2) == pytest.approx(prf(*r2), abs=1e-9)
    assert tuple(s.rougeL) == pytest.approx(prf(*rl), abs=1e-9)


def test_tokenizer():
    assert tokenize_for_metrics("It's 3pm -- OK?") == ["it", "s", "3pm", "ok"]


def test_smoothing_only_affects_higher_orders():
    c, r = ["b", "a"], ["a", "b"]
    assert bleu(c, r) == 0.0
    assert bleu(c, r, smoothing=True) == pytest.approx(math.sqrt(1 * 1 / 2))


def test_empty_inputs():
    assert bleu([], ["a"]) == 0.0
    assert rouge_n([], ["a"]) == PRF(0.0, 0.0, 0.0)
    assert rouge_l(["a"], []) == PRF(0.0, 0.0, 0.0)
    assert lcs_length([], []) == 0


def test_mean_report():
    mean = mean_report([score("a b", "a b"), score("a", "b")])
    assert mean["pairs"] == 2
    assert mean["bleu1"] == pytest.approx(0.5)
    assert mean["rougeL"]["f1"] == pytest.approx(0.5)
