"""Figures written next to the structured-text reports."""
from __future__ import annotations

from collections import Counter
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from phantomtok.metrics import METRIC_NAMES  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.titlesize": 10,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "figure.dpi": 120,
}


def _save(fig, path) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def plot_injection(report, path) -> Path:
    """Words inserted per page, with the file-size change in the title."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(6, 3))
        pages = [p.page + 1 for p in report.per_page]
        ax.bar(pages, [p.words_inserted for p in report.per_page], color="0.35")
        ax.set_xlabel("page")
        ax.set_ylabel("phantom words")
        growth = (report.bytes_after - report.bytes_before) / max(report.bytes_before, 1)
        ax.set_title(f"{report.words_inserted} words in {report.gaps_total} gaps, size {growth:+.1%}")
        return _save(fig, path)


def plot_hidden_runs(reports, path) -> Path:
    """Hidden runs per page, stacked by visibility class."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(6, 3))
        counts = Counter((r.page, r.visibility.value) for r in reports)
        classes = sorted({c for _, c in counts})
        pages = sorted({p for p, _ in counts}) or [0]
        bottom = [0] * len(pages)
        for cls in classes:
            heights = [counts.get((p, cls), 0) for p in pages]
            ax.bar([p + 1 for p in pages], heights, bottom=bottom, label=cls)
            bottom = [b + h for b, h in zip(bottom, heights)]
        ax.set_xlabel("page")
        ax.set_ylabel("hidden runs")
        if classes:
            ax.legend(frameon=False)
        return _save(fig, path)


def plot_scores(mean: dict, path, metrics=METRIC_NAMES) -> Path:
    """Mean metric values (F1 for ROUGE) as a bar chart on [0, 1]."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5, 3))
        values = [mean[m]["f1"] if isinstance(mean[m], dict) else mean[m] for m in metrics]
        ax.bar(list(metrics), values, color="0.35")
        ax.set_ylim(0, 1)
        ax.set_ylabel("mean score")
        ax.set_title(f"surface similarity over {mean.get('pairs', 1)} pair(s)")
        return _save(fig, path)
