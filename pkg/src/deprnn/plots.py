"""Figure rendering for training histories and completion reports."""

from __future__ import annotations

from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .completion import EvalReport
from .training import EpochStats

CHANCE = 0.2  # five candidates


def render_history_figure(history: Sequence[EpochStats], path) -> None:
    """Training perplexity and dev accuracy per epoch, on twin axes."""
    epochs = [s.epoch for s in history]
    perplexity = [2.0 ** s.train_entropy for s in history]
    accuracy = [s.dev_accuracy for s in history]
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    ax.plot(epochs, perplexity, marker="o", color="tab:blue", label="train perplexity")
    ax.set_xlabel("epoch")
    ax.set_ylabel("train perplexity", color="tab:blue")
    ax.set_yscale("log")
    ax.tick_params(axis="y", labelcolor="tab:blue")
    if any(a is not None for a in accuracy):
        ax2 = ax.twinx()
        ax2.plot(epochs, accuracy, marker="s", color="tab:red", label="dev accuracy")
        ax2.set_ylabel("dev completion accuracy", color="tab:red")
        ax2.set_ylim(0.0, 1.0)
        ax2.tick_params(axis="y", labelcolor="tab:red")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_report_figure(reports: Sequence[EvalReport], path) -> None:
    """Accuracy per split next to a histogram of gold-vs-best-rival margins."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 4.0))
    names = [r.split for r in reports]
    values = [r.accuracy for r in reports]
    ax1.bar(names, values, color="tab:blue", width=0.6)
    ax1.axhline(CHANCE, color="tab:red", linestyle="--", linewidth=1, label="chance")
    ax1.set_ylim(0.0, 1.0)
    ax1.set_ylabel("completion accuracy")
    ax1.legend(loc="upper right")
    margins = []
    for report in reports:
        if report.split not in ("all", "combined"):
            continue
        for r in report.results:
            rivals = [s for i, s in enumerate(r.scores) if i != r.gold]
            margins.append(r.scores[r.gold] - max(rivals))
    if not margins:
        for report in reports:
            for r in report.results:
                rivals = [s for i, s in enumerate(r.scores) if i != r.gold]
                margins.append(r.scores[r.gold] - max(rivals))
    ax2.hist(margins, bins=30, color="tab:blue", alpha=0.8)
    ax2.axvline(0.0, color="tab:red", linestyle="--", linewidth=1)
    ax2.set_xlabel("gold log-probability margin")
    ax2.set_ylabel("problems")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
