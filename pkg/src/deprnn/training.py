"""Online SGD training with truncated backpropagation through time.

Sequential mode treats each sentence as one left-to-right sequence ending in
the END sentinel.  Dependency modes train on every root-to-leaf unroll of the
parse tree; a token appearing in n unrolls is updated n times per epoch at
rate lr / n, so its total per-epoch learning mass matches a once-seen token.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .completion import CompletionProblem, evaluate
from .corpus import LabelInventory, Sentence, Vocabulary
from .deptree import TreeError, extract_unrolls, node_stats, validate_tree
from .model import MODES, Model, SequenceRun, apply_position_update

log = logging.getLogger(__name__)

LOG2 = math.log(2.0)


@dataclass
class TrainConfig:
    lr: float = 0.1
    decay: float = 0.66
    bptt_steps: int = 5
    max_epochs: int = 10
    min_lr: float = 1e-4
    mode: str = "seq"
    shuffle_seed: int = 1

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.lr < 0:
            raise ValueError(f"lr must be >= 0, got {self.lr}")
        if not 0 < self.decay <= 1:
            raise ValueError(f"decay must be in (0, 1], got {self.decay}")
        if self.bptt_steps < 1:
            raise ValueError(f"bptt_steps must be >= 1, got {self.bptt_steps}")
        if self.max_epochs < 0:
            raise ValueError(f"max_epochs must be >= 0, got {self.max_epochs}")


@dataclass
class EpochStats:
    epoch: int
    lr: float
    train_entropy: float  # mean bits per deduplicated token
    token_count: int
    dev_accuracy: float | None = None


@dataclass
class TrainState:
    current_lr: float
    epoch: int = 0
    annealing: bool = False
    prev_metric: float | None = None
    history: list[EpochStats] = field(default_factory=list)


@dataclass
class UpdateRecord:
    """One parameter update, for instrumentation: which token was trained,
    from which input, at what effective rate."""

    sentence: int
    node: int
    input_id: int
    target_id: int
    rate: float


@dataclass
class SequenceResult:
    loss: float               # summed cross-entropy in nats, pre-update per position
    logprobs: np.ndarray      # natural-log P(target) per position


def train_sequence(
    model: Model,
    token_ids: Sequence[int],
    label_ids: Sequence[int] | None = None,
    discounts: Sequence[float] | None = None,
    lr: float = 0.1,
    bptt_steps: int = 5,
    ledger: list | None = None,
) -> SequenceResult:
    """Online SGD over one sequence: after each position's loss is measured,
    its gradient (truncated at ``bptt_steps``) is applied at rate
    ``discount * lr``, so later positions see the updated parameters.
    Returns the pre-update loss per position."""
    run = SequenceRun(model, token_ids, label_ids)
    for t in range(len(run)):
        run.advance()
        rate = lr * (discounts[t] if discounts is not None else 1.0)
        if ledger is not None:
            ledger.append((t, run.inputs[t], run.targets[t], rate))
        if rate != 0.0:
            apply_position_update(model.params, run.gradient_terms(t, bptt_steps), rate)
    return SequenceResult(loss=run.loss, logprobs=run.logprobs.copy())


@dataclass
class PreparedSequence:
    targets: list[int]
    labels: list[int] | None
    discounts: list[float] | None
    nodes: list[int] | None  # node index per position (dependency modes only)


@dataclass
class PreparedSentence:
    sequences: list[PreparedSequence]


def prepare_corpus(
    sentences: Iterable[Sentence],
    vocab: Vocabulary,
    labels: LabelInventory | None,
    mode: str,
) -> list[PreparedSentence]:
    """Map raw sentences to per-epoch training sequences.

    In dependency modes each sentence contributes one sequence per unroll
    with per-position 1/n discounts; sentences that fail tree validation are
    skipped with a warning.  In sequential mode the (single) sequence is the
    word ids plus the END sentinel, undiscounted.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    prepared: list[PreparedSentence] = []
    skipped = 0
    for i, sentence in enumerate(sentences):
        if mode == "seq":
            targets = [vocab.lookup(t.surface) for t in sentence] + [vocab.end_id]
            prepared.append(
                PreparedSentence([PreparedSequence(targets, None, None, None)])
            )
            continue
        try:
            tree = validate_tree(sentence, vocab, labels)
        except TreeError as err:
            log.warning("skipping unusable training sentence %d: %s", i, err)
            skipped += 1
            continue
        stats = node_stats(tree)
        sequences = []
        for path in extract_unrolls(tree):
            sequences.append(
                PreparedSequence(
                    targets=[tree.word_ids[n] for n in path],
                    labels=[tree.label_ids[n] for n in path] if mode == "ldep" else None,
                    discounts=[stats.discounts[n] for n in path],
                    nodes=list(path),
                )
            )
        prepared.append(PreparedSentence(sequences))
    if skipped:
        log.warning("skipped %d of %d training sentences", skipped, skipped + len(prepared))
    return prepared


def train_epoch(
    model: Model,
    prepared: Sequence[PreparedSentence],
    config: TrainConfig,
    lr: float,
    epoch: int,
    ledger: list[UpdateRecord] | None = None,
) -> EpochStats:
    """One pass over the corpus in a seeded shuffled sentence order.

    The reported entropy is the mean over deduplicated tokens (each tree
    node once, at its first visit) of -log2 P, measured pre-update.
    """
    rng = np.random.default_rng([config.shuffle_seed, epoch])
    order = rng.permutation(len(prepared))
    nll_bits = 0.0
    tokens = 0
    for si in order:
        sentence = prepared[si]
        seen: set[int] = set()
        for seq in sentence.sequences:
            seq_ledger: list | None = [] if ledger is not None else None
            result = train_sequence(
                model,
                seq.targets,
                seq.labels,
                seq.discounts,
                lr=lr,
                bptt_steps=config.bptt_steps,
                ledger=seq_ledger,
            )
            if seq_ledger is not None:
                for t, input_id, target_id, rate in seq_ledger:
                    node = seq.nodes[t] if seq.nodes is not None else t
                    ledger.append(UpdateRecord(int(si), node, input_id, target_id, rate))
            for t in range(len(seq.targets)):
                key = seq.nodes[t] if seq.nodes is not None else t
                if key in seen:
                    continue
                seen.add(key)
                nll_bits -= result.logprobs[t] / LOG2
                tokens += 1
    entropy = nll_bits / tokens if tokens else 0.0
    return EpochStats(epoch=epoch, lr=lr, train_entropy=entropy, token_count=tokens)


def anneal(state: TrainState, metric: float, decay: float) -> None:
    """Latch once the dev metric strictly decreases; once latched, multiply
    the learning rate by ``decay`` after every epoch, forever."""
    if not state.annealing and state.prev_metric is not None and metric < state.prev_metric:
        state.annealing = True
    if state.annealing:
        state.current_lr *= decay
    state.prev_metric = metric


@dataclass
class TrainResult:
    model: Model        # best-dev checkpoint
    state: TrainState


def train(
    model: Model,
    train_sentences: Iterable[Sentence],
    dev_problems: Sequence[CompletionProblem],
    config: TrainConfig,
    progress: Callable[[EpochStats], None] | None = None,
) -> TrainResult:
    """Full training loop: epochs until ``max_epochs`` or lr < ``min_lr``;
    measures dev completion accuracy after each epoch, anneals, and keeps
    the best-dev parameters.  ``model`` itself ends with the final-epoch
    parameters; the returned model is the best-dev checkpoint."""
    prepared = prepare_corpus(train_sentences, model.vocab, model.labels, config.mode)
    state = TrainState(current_lr=config.lr)
    best_params = model.params.copy()
    best_accuracy = -1.0
    for epoch in range(1, config.max_epochs + 1):
        if state.current_lr < config.min_lr:
            log.info("stopping: lr %g below min_lr %g", state.current_lr, config.min_lr)
            break
        stats = train_epoch(model, prepared, config, state.current_lr, epoch)
        report = evaluate(model, dev_problems, config.mode, split="dev")
        stats.dev_accuracy = report.accuracy
        state.history.append(stats)
        state.epoch = epoch
        if report.accuracy > best_accuracy:
            best_accuracy = report.accuracy
            best_params = model.params.copy()
        anneal(state, report.accuracy, config.decay)
        if progress is not None:
            progress(stats)
    best = Model(model.hyper, best_params, model.vocab, model.classes, model.labels, model.mode)
    return TrainResult(model=best, state=state)


def format_history(history: Sequence[EpochStats]) -> str:
    """History sidecar: one ``epoch<TAB>lr<TAB>train_entropy<TAB>dev_accuracy``
    line per epoch."""
    lines = []
    for s in history:
        acc = f"{s.dev_accuracy:.6f}" if s.dev_accuracy is not None else "nan"
        lines.append(f"{s.epoch}\t{s.lr:.8g}\t{s.train_entropy:.6f}\t{acc}")
    return "\n".join(lines) + ("\n" if lines else "")
