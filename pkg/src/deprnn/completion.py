"""Five-way sentence completion: problem files, splits, scoring and reports."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, TextIO

from .corpus import ConllError, Sentence, parse_conll
from .deptree import TreeError, validate_tree
from .model import Model
from .scoring import score_dependency, score_sequential

CANDIDATES = 5

_HEADER_RE = re.compile(r"^#PROBLEM\s+(\S+)\s+GOLD=(\d+)\s*$")


class ProblemFormatError(ValueError):
    """Malformed completion problem file; the message names the problem."""


@dataclass
class CompletionProblem:
    problem_id: str
    gold: int
    candidates: list[Sentence]


def load_completion_set(source: str | Path | TextIO) -> list[CompletionProblem]:
    """Parse a problem file: records introduced by ``#PROBLEM <id> GOLD=<k>``
    lines, each followed by exactly five CoNLL sentence blocks."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        text = Path(source).read_text(encoding="utf-8")
    problems: list[CompletionProblem] = []
    header: tuple[str, int] | None = None
    buffer: list[str] = []

    def flush() -> None:
        if header is None:
            if any(line.strip() and not line.startswith("#") for line in buffer):
                raise ProblemFormatError("content before the first #PROBLEM header")
            return
        problem_id, gold = header
        try:
            candidates = parse_conll(buffer)
        except ConllError as err:
            raise ProblemFormatError(f"problem {problem_id}: {err}") from None
        if len(candidates) != CANDIDATES:
            raise ProblemFormatError(
                f"problem {problem_id}: expected {CANDIDATES} candidate sentences, "
                f"found {len(candidates)}"
            )
        if not 0 <= gold < CANDIDATES:
            raise ProblemFormatError(
                f"problem {problem_id}: GOLD={gold} outside [0, {CANDIDATES})"
            )
        problems.append(CompletionProblem(problem_id, gold, candidates))

    for line in text.splitlines():
        if line.startswith("#PROBLEM"):
            flush()
            match = _HEADER_RE.match(line)
            if not match:
                raise ProblemFormatError(f"bad problem header {line!r}")
            header = (match.group(1), int(match.group(2)))
            buffer = []
        else:
            buffer.append(line)
    flush()
    return problems


def split_dev_test(
    problems: Sequence[CompletionProblem],
) -> tuple[list[CompletionProblem], list[CompletionProblem]]:
    """Development set = first ceil(half) problems in file order, test = rest."""
    cut = (len(problems) + 1) // 2
    return list(problems[:cut]), list(problems[cut:])


@dataclass
class ProblemResult:
    problem_id: str
    chosen: int
    gold: int
    scores: list[float]
    token_counts: list[int]

    @property
    def correct(self) -> bool:
        return self.chosen == self.gold


@dataclass
class EvalReport:
    split: str
    results: list[ProblemResult]
    accuracy: float


def report_from_results(results: Sequence[ProblemResult], split: str) -> EvalReport:
    correct = sum(1 for r in results if r.correct)
    accuracy = correct / len(results) if results else 0.0
    return EvalReport(split=split, results=list(results), accuracy=accuracy)


def evaluate(
    model: Model,
    problems: Sequence[CompletionProblem],
    mode: str,
    split: str = "all",
) -> EvalReport:
    """Choose argmax total log-probability per problem (ties -> lowest index)."""
    results = []
    for problem in problems:
        scores: list[float] = []
        counts: list[int] = []
        for candidate in problem.candidates:
            if mode == "seq":
                ids = [model.vocab.lookup(t.surface) for t in candidate]
                score = score_sequential(model, ids)
            else:
                try:
                    tree = validate_tree(candidate, model.vocab, model.labels)
                except TreeError as err:
                    raise ProblemFormatError(
                        f"problem {problem.problem_id}: {err}"
                    ) from None
                score = score_dependency(model, tree, use_labels=(mode == "ldep"))
            scores.append(score.total)
            counts.append(score.token_count)
        chosen = max(range(CANDIDATES), key=lambda i: (scores[i], -i))
        results.append(ProblemResult(problem.problem_id, chosen, problem.gold, scores, counts))
    return report_from_results(results, split)


def report_perplexities(report: EvalReport) -> tuple[float, float]:
    """(gold-candidate perplexity, all-candidate perplexity) over a report."""
    gold_total = gold_count = all_total = all_count = 0.0
    for r in report.results:
        gold_total += r.scores[r.gold]
        gold_count += r.token_counts[r.gold]
        all_total += sum(r.scores)
        all_count += sum(r.token_counts)
    gold = math.exp(-gold_total / gold_count) if gold_count else float("nan")
    both = math.exp(-all_total / all_count) if all_count else float("nan")
    return gold, both


def format_report(report: EvalReport) -> str:
    """Delimited report: one problem per line plus an accuracy footer."""
    lines = []
    for r in report.results:
        scores = "\t".join(f"{s:.6f}" for s in r.scores)
        lines.append(f"{r.problem_id}\t{r.chosen}\t{r.gold}\t{scores}")
    lines.append(f"ACCURACY {report.split} = {report.accuracy:.4f}")
    return "\n".join(lines) + "\n"
