"""Command line interface: build-vocab, train, score, complete."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import corpus as corpus_mod
from .completion import (
    ProblemFormatError,
    format_report,
    load_completion_set,
    report_from_results,
    report_perplexities,
    split_dev_test,
)
from .corpus import ConllError, VocabFormatError
from .deptree import TreeError
from .model import (
    MODES,
    HyperParams,
    ModelFormatError,
    load_model,
    new_model,
    save_model,
)
from .scoring import score_sentence
from .training import TrainConfig, format_history, train

log = logging.getLogger(__name__)

# Reference full-scale presets: hidden in {50, 100, 200, 300}, order in
# {2, 3, 4}, direct-size 10**9, classes 250, min-count 5, decay 0.66.  The
# defaults below keep the same shape at a desk-friendly direct-size.


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="deprnn",
        description="Recurrent language models over dependency trees, with "
        "sentence scoring and five-way completion evaluation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-vocab", help="count words and write a vocabulary table")
    p.add_argument("corpus", nargs="+", help="CoNLL training file(s)")
    p.add_argument("--min-count", type=int, default=5, help="frequency threshold (default 5)")
    p.add_argument("--classes", type=int, default=250, help="number of frequency classes (default 250)")
    p.add_argument("--out", required=True, help="output vocabulary file")

    p = sub.add_parser("train", help="train a model")
    p.add_argument("corpus", nargs="+", help="CoNLL training file(s)")
    p.add_argument("--dev", required=True, help="completion problem file for the annealing metric")
    p.add_argument("--out", required=True, help="output model file")
    p.add_argument("--vocab", help="vocabulary file from build-vocab (default: built from the corpus)")
    p.add_argument("--mode", choices=MODES, default="seq",
                   help="seq = sequential, dep = dependency unrolls, ldep = labelled (default seq)")
    p.add_argument("--hidden", type=int, default=100, help="hidden layer size (default 100)")
    p.add_argument("--classes", type=int, default=250, help="frequency classes (default 250)")
    p.add_argument("--min-count", type=int, default=5, help="vocabulary threshold (default 5)")
    p.add_argument("--order", type=int, default=3,
                   help="max n-gram order of the direct connections, 1 = bias only (default 3)")
    p.add_argument("--direct-size", type=int, default=1000003,
                   help="direct feature array length (default 1000003; 10**9 at full scale)")
    p.add_argument("--bptt", type=int, default=5, help="backprop-through-time steps (default 5)")
    p.add_argument("--lr", type=float, default=0.1, help="initial learning rate (default 0.1)")
    p.add_argument("--decay", type=float, default=0.66, help="annealing decay factor (default 0.66)")
    p.add_argument("--seed", type=int, default=1, help="parameter init seed (default 1)")
    p.add_argument("--shuffle-seed", type=int, default=1, help="epoch shuffle seed (default 1)")
    p.add_argument("--max-epochs", type=int, default=10, help="epoch budget (default 10)")
    p.add_argument("--min-lr", type=float, default=1e-4, help="stop once lr falls below (default 1e-4)")
    p.add_argument("--no-figure", action="store_true", help="skip the history figure")

    p = sub.add_parser("score", help="score sentences from a CoNLL file")
    p.add_argument("model", help="model file")
    p.add_argument("input", help="CoNLL file of sentences to score")
    p.add_argument("--mode", choices=MODES, help="override the model's recorded mode")
    p.add_argument("--out", help="write the report here instead of stdout")

    p = sub.add_parser("complete", help="evaluate on a completion problem file")
    p.add_argument("model", help="model file")
    p.add_argument("problems", help="completion problem file")
    p.add_argument("--mode", choices=MODES, help="override the model's recorded mode")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--no-figure", action="store_true", help="skip the report figure")
    return parser


def _load_corpus(paths: list[str]) -> list[corpus_mod.Sentence]:
    sentences: list[corpus_mod.Sentence] = []
    for path in paths:
        sentences.extend(corpus_mod.read_conll(path))
    return sentences


def cmd_build_vocab(args: argparse.Namespace) -> int:
    sentences = _load_corpus(args.corpus)
    vocab = corpus_mod.build_vocabulary(sentences, min_count=args.min_count)
    classes = corpus_mod.assign_classes(vocab, args.classes)
    corpus_mod.write_vocab_file(vocab, classes, args.out)
    print(f"wrote {len(vocab)} words in {classes.num_classes} classes to {args.out}")
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    sentences = _load_corpus(args.corpus)
    if args.vocab:
        vocab, classes = corpus_mod.read_vocab_file(args.vocab)
    else:
        vocab = corpus_mod.build_vocabulary(sentences, min_count=args.min_count)
        classes = corpus_mod.assign_classes(vocab, args.classes)
    labels = corpus_mod.collect_labels(sentences) if args.mode == "ldep" else None
    hyper = HyperParams(
        hidden=args.hidden,
        vocab_size=len(vocab),
        num_classes=classes.num_classes,
        num_labels=len(labels) if labels is not None else 0,
        order=args.order,
        direct_size=args.direct_size,
        seed=args.seed,
    )
    model = new_model(hyper, vocab, classes, labels, mode=args.mode)
    dev_problems = load_completion_set(args.dev)
    config = TrainConfig(
        lr=args.lr,
        decay=args.decay,
        bptt_steps=args.bptt,
        max_epochs=args.max_epochs,
        min_lr=args.min_lr,
        mode=args.mode,
        shuffle_seed=args.shuffle_seed,
    )

    def progress(stats) -> None:
        print(format_history([stats]), end="")

    result = train(model, sentences, dev_problems, config, progress=progress)
    save_model(result.model, args.out)
    history_path = Path(args.out).with_suffix(Path(args.out).suffix + ".history.tsv")
    history_path.write_text(format_history(result.state.history), encoding="utf-8")
    print(f"wrote model to {args.out} and history to {history_path}")
    if not args.no_figure and result.state.history:
        from .plots import render_history_figure

        figure_path = history_path.with_suffix(".png")
        render_history_figure(result.state.history, figure_path)
        print(f"wrote history figure to {figure_path}")
    return 0


def cmd_score(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    mode = args.mode or model.mode
    sentences = corpus_mod.read_conll(args.input)
    lines = []
    for sentence in sentences:
        score = score_sentence(model, sentence, mode)
        if mode == "seq":
            names = [t.surface for t in sentence] + [corpus_mod.END_SURFACE]
            parts = [f"{names[i]}:{score.per_token[i]:.6f}" for i in range(len(names))]
        else:
            parts = [
                f"{sentence[i].surface}:{score.per_token[i]:.6f}"
                for i in sorted(score.per_token)
            ]
        lines.append(f"{score.total:.6f}\t{score.token_count}\t" + " ".join(parts))
    text = "\n".join(lines) + ("\n" if lines else "")
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        print(text, end="")
    return 0


def cmd_complete(args: argparse.Namespace) -> int:
    from .completion import evaluate

    model = load_model(args.model)
    mode = args.mode or model.mode
    problems = load_completion_set(args.problems)
    combined = evaluate(model, problems, mode, split="combined")
    dev_problems, test_problems = split_dev_test(problems)
    dev = report_from_results(combined.results[: len(dev_problems)], "dev")
    test = report_from_results(combined.results[len(dev_problems):], "test")
    gold_ppl, all_ppl = report_perplexities(combined)
    text = format_report(combined)
    text += f"ACCURACY dev = {dev.accuracy:.4f}\n"
    text += f"ACCURACY test = {test.accuracy:.4f}\n"
    text += f"PPL-GOLD combined = {gold_ppl:.4f}\n"
    text += f"PPL-ALL combined = {all_ppl:.4f}\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote report to {args.out}")
        if not args.no_figure:
            from .plots import render_report_figure

            figure_path = Path(args.out).with_suffix(Path(args.out).suffix + ".png")
            render_report_figure([dev, test, combined], figure_path)
            print(f"wrote report figure to {figure_path}")
    else:
        print(text, end="")
    return 0


_COMMANDS = {
    "build-vocab": cmd_build_vocab,
    "train": cmd_train,
    "score": cmd_score,
    "complete": cmd_complete,
}


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (
        ConllError,
        VocabFormatError,
        TreeError,
        ModelFormatError,
        ProblemFormatError,
        OSError,
        ValueError,
    ) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
