"""Sentence-level BLEU-1/2 and ROUGE-1/2/L."""
from __future__ import annotations

import json
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import NamedTuple

_SPLIT = re.compile(r"[^0-9a-z]+")
METRIC_NAMES = ("bleu1", "bleu2", "rouge1", "rouge2", "rougeL")


class PRF(NamedTuple):
    precision: float
    recall: float
    f1: float


ZERO = PRF(0.0, 0.0, 0.0)


def f_measure(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def tokenize_for_metrics(text: str) -> list[str]:
    """Lowercase, then split on every run of non-alphanumeric characters."""
    return [t for t in _SPLIT.split(text.lower()) if t]


def ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu(candidate: list[str], reference: list[str], max_n: int = 2, smoothing: bool = False) -> float:
    """Uniform-weight BLEU without smoothing unless asked (add-one for n >= 2)."""
    if max_n < 1:
        raise ValueError("max_n must be >= 1")
    if not candidate:
        return 0.0
    log_sum = 0.0
    for n in range(1, max_n + 1):
        cand = ngrams(candidate, n)
        ref = ngrams(reference, n)
        total = sum(cand.values())
        matched = sum(min(c, ref[g]) for g, c in cand.items())
        if smoothing and n > 1:
            matched, total = matched + 1, total + 1
        if matched == 0 or total == 0:
            return 0.0
        log_sum += math.log(matched / total)
    c, r = len(candidate), len(reference)
    bp = 1.0 if c >= r else math.exp(1 - r / c)
    return bp * math.exp(log_sum / max_n)


def rouge_n(candidate: list[str], reference: list[str], n: int = 1) -> PRF:
    if n < 1:
        raise ValueError("n must be >= 1")
    cand = ngrams(candidate, n)
    ref = ngrams(reference, n)
    c_total, r_total = sum(cand.values()), sum(ref.values())
    if not c_total or not r_total:
        return ZERO
    overlap = sum(min(c, ref[g]) for g, c in cand.items())
    p, r = overlap / c_total, overlap / r_total
    return PRF(p, r, f_measure(p, r))


def lcs_length(a: list[str], b: list[str]) -> int:
    if len(a) < len(b):
        a, b = b, a
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b):
            cur.append(prev[j] + 1 if x == y else max(prev[j + 1], cur[j]))
        prev = cur
    return prev[-1]


def rouge_l(candidate: list[str], reference: list[str]) -> PRF:
    if not candidate or not reference:
        return ZERO
    length = lcs_length(candidate, reference)
    p, r = length / len(candidate), length / len(reference)
    return PRF(p, r, f_measure(p, r))


@dataclass
class ScoreReport:
    bleu1: float
    bleu2: float
    rouge1: PRF
    rouge2: PRF
    rougeL: PRF
    token_counts: tuple[int, int]
    flags: list[str] = field(default_factory=list)
    pair_id: str | None = None

    def value(self, name: str) -> float:
        """Scalar for a metric name; ROUGE scores report their F1."""
        item = getattr(self, name)
        return item.f1 if isinstance(item, PRF) else item

    def to_record(self, metrics=METRIC_NAMES) -> dict:
        record: dict = {"id": self.pair_id} if self.pair_id is not None else {}
        for name in metrics:
            item = getattr(self, name)
            record[name] = item._asdict() if isinstance(item, PRF) else item
        record["tokens"] = {"candidate": self.token_counts[0], "reference": self.token_counts[1]}
        if self.flags:
            record["flags"] = self.flags
        return record

    def to_line(self, metrics=METRIC_NAMES) -> str:
        return json.dumps(self.to_record(metrics))


def score(candidate: str, reference: str, *, smoothing: bool = False, pair_id: str | None = None) -> ScoreReport:
    cand = tokenize_for_metrics(candidate)
    ref = tokenize_for_metrics(reference)
    flags = []
    if not cand:
        flags.append("empty_candidate")
    if not ref:
        flags.append("empty_reference")
    return ScoreReport(
        bleu1=bleu(cand, ref, 1, smoothing),
        bleu2=bleu(cand, ref, 2, smoothing),
        rouge1=rouge_n(cand, ref, 1),
        rouge2=rouge_n(cand, ref, 2),
        rougeL=rouge_l(cand, ref),
        token_counts=(len(cand), len(ref)),
        flags=flags,
        pair_id=pair_id,
    )


def mean_report(reports: list[ScoreReport]) -> dict:
    """Arithmetic mean of each metric over pairs (ROUGE triples averaged per field)."""
    if not reports:
        return {}
    out: dict = {"id": "mean", "pairs": len(reports)}
    for name in METRIC_NAMES:
        values = [getattr(r, name) for r in reports]
        if isinstance(values[0], PRF):
            out[name] = {f: sum(getattr(v, f) for v in values) / len(values) for f in PRF._fields}
        else:
            out[name] = sum(values) / len(values)
    return out
