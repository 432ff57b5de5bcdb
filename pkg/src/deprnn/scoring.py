"""Sentence log-probabilities and corpus perplexity."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .corpus import Sentence
from .deptree import DependencyTree, TreeError, extract_unrolls, validate_tree
from .model import Model, forward_sequence

log = logging.getLogger(__name__)


@dataclass
class SentenceScore:
    """Per-token natural-log probabilities and their sum.

    For sequential scoring the keys are word positions 0..L-1 plus key L for
    the end-of-sentence event; for dependency scoring they are node indexes,
    each tree node appearing exactly once.
    """

    per_token: dict[int, float]
    total: float
    token_count: int


def score_sequential(model: Model, word_ids: Sequence[int]) -> SentenceScore:
    """Score each word from its predecessors, plus the END sentinel at the end.

    The hidden state starts at zero and the root sentinel is the first input,
    so an empty sentence scores only the END event from the start state.
    """
    targets = list(word_ids) + [model.vocab.end_id]
    run = forward_sequence(model, targets)
    per_token = {i: float(lp) for i, lp in enumerate(run.logprobs)}
    return SentenceScore(per_token, float(run.logprobs.sum()), len(targets))


def score_dependency(model: Model, tree: DependencyTree, use_labels: bool = False) -> SentenceScore:
    """Score every node once, conditioned on its ancestor path.

    Each unroll is run independently from a reset state with the root
    sentinel fed first; a node's log-probability is taken from the first
    unroll that reaches it (later unrolls replay the identical ancestor
    prefix, so their values coincide and are skipped).
    """
    per_token: dict[int, float] = {}
    for path in extract_unrolls(tree):
        targets = [tree.word_ids[i] for i in path]
        labels = [tree.label_ids[i] for i in path] if use_labels else None
        run = forward_sequence(model, targets, labels)
        for pos, node in enumerate(path):
            if node not in per_token:
                per_token[node] = float(run.logprobs[pos])
    total = sum(per_token.values())
    return SentenceScore(per_token, total, len(per_token))


def score_sentence(model: Model, sentence: Sentence, mode: str) -> SentenceScore:
    """Score one raw sentence in the given mode (``seq``, ``dep`` or ``ldep``)."""
    if mode == "seq":
        return score_sequential(model, [model.vocab.lookup(t.surface) for t in sentence])
    tree = validate_tree(sentence, model.vocab, model.labels)
    return score_dependency(model, tree, use_labels=(mode == "ldep"))


def perplexity(model: Model, sentences: Iterable[Sentence], mode: str) -> float:
    """exp of the mean per-token negative log-probability over the corpus.

    In dependency modes, sentences that do not form valid trees are skipped
    with a warning; an empty or fully skipped corpus is an error.
    """
    total = 0.0
    count = 0
    for i, sentence in enumerate(sentences):
        try:
            score = score_sentence(model, sentence, mode)
        except TreeError as err:
            log.warning("skipping unscorable sentence %d: %s", i, err)
            continue
        total += score.total
        count += score.token_count
    if count == 0:
        raise ValueError("no scoreable tokens in the corpus")
    return math.exp(-total / count)
