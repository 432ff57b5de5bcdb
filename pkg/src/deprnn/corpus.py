"""CoNLL ingestion, vocabulary construction, frequency classes, and label inventory."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable

import numpy as np

log = logging.getLogger(__name__)

# Reserved sentinel surfaces.  They are appended to every vocabulary after the
# content words (in this order), so their ids are always the last three.
UNK_SURFACE = "<unk>"
ROOT_SURFACE = "<root>"
END_SURFACE = "</s>"
SENTINELS = (UNK_SURFACE, ROOT_SURFACE, END_SURFACE)

# Reserved dependency relation for the edge between a tree's root token and
# the artificial root node.
ROOT_LABEL = "root"


class ConllError(ValueError):
    """Malformed CoNLL input; the message names the offending line."""


class VocabFormatError(ValueError):
    """Malformed vocabulary or label table."""


@dataclass(frozen=True)
class RawToken:
    """One CoNLL token: 1-based position, surface form, head position (0 = root), relation."""

    position: int
    surface: str
    head: int
    label: str


Sentence = list[RawToken]


def parse_conll(stream: str | Iterable[str]) -> list[Sentence]:
    """Parse tab-separated CoNLL text into sentences of RawToken.

    Only columns 1 (ID), 2 (FORM), 7 (HEAD) and 8 (DEPREL) are retained.
    Blank lines separate sentences, ``#`` comment lines are ignored, and
    token lines whose ID contains ``-`` (multiword ranges) are skipped.
    """
    lines = stream.splitlines() if isinstance(stream, str) else stream
    sentences: list[Sentence] = []
    tokens: Sentence = []
    token_lines: list[int] = []

    def flush() -> None:
        if not tokens:
            return
        n = len(tokens)
        for tok, ln in zip(tokens, token_lines):
            if tok.head > n:
                raise ConllError(
                    f"line {ln}: HEAD {tok.head} out of range for a {n}-token sentence"
                )
        sentences.append(list(tokens))
        tokens.clear()
        token_lines.clear()

    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            flush()
            continue
        if line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) < 8:
            raise ConllError(
                f"line {lineno}: expected at least 8 tab-separated columns, got {len(fields)}"
            )
        if "-" in fields[0]:
            continue
        try:
            position = int(fields[0])
        except ValueError:
            raise ConllError(f"line {lineno}: non-integer token ID {fields[0]!r}") from None
        try:
            head = int(fields[6])
        except ValueError:
            raise ConllError(f"line {lineno}: non-integer HEAD {fields[6]!r}") from None
        if not fields[1]:
            raise ConllError(f"line {lineno}: empty FORM")
        if position != len(tokens) + 1:
            raise ConllError(
                f"line {lineno}: token ID {position} out of sequence "
                f"(expected {len(tokens) + 1})"
            )
        if head < 0:
            raise ConllError(f"line {lineno}: negative HEAD {head}")
        tokens.append(RawToken(position, fields[1], head, fields[7]))
        token_lines.append(lineno)
    flush()
    return sentences


def read_conll(path) -> list[Sentence]:
    """Parse a CoNLL file from disk."""
    with open(path, encoding="utf-8") as fh:
        return parse_conll(fh)


def emit_conll(sentences: Iterable[Sentence]) -> str:
    """Render sentences back to 10-column CoNLL text (unretained columns as ``_``)."""
    blocks = []
    for sent in sentences:
        blocks.append(
            "\n".join(
                f"{t.position}\t{t.surface}\t_\t_\t_\t_\t{t.head}\t{t.label}\t_\t_"
                for t in sent
            )
        )
    return "\n\n".join(blocks) + ("\n" if blocks else "")


@dataclass
class Vocabulary:
    """Word surfaces with frequency counts; ids are indexes into ``entries``.

    Content words come first, sorted by descending count (ties broken by
    first occurrence in the corpus); the three sentinels are last.
    """

    entries: list[tuple[str, int]]
    index: dict[str, int]
    min_count: int
    unk_id: int
    root_id: int
    end_id: int

    def __len__(self) -> int:
        return len(self.entries)

    def lookup(self, surface: str) -> int:
        """Map a surface to its word id; unseen surfaces map to the UNK sentinel."""
        return self.index.get(surface, self.unk_id)

    def surface(self, word_id: int) -> str:
        return self.entries[word_id][0]

    def count(self, word_id: int) -> int:
        return self.entries[word_id][1]


def build_vocabulary(sentences: Iterable[Sentence], min_count: int = 5) -> Vocabulary:
    """Count exact surfaces and keep those seen at least ``min_count`` times.

    Matching is exact: capitalization variants are distinct words.  Sentinel
    surfaces occurring in the corpus are dropped (with a warning) so the
    reserved ids stay unambiguous.
    """
    if min_count < 1:
        raise ValueError(f"min_count must be >= 1, got {min_count}")
    counts: dict[str, int] = {}
    for sent in sentences:
        for tok in sent:
            counts[tok.surface] = counts.get(tok.surface, 0) + 1
    for reserved in SENTINELS:
        if counts.pop(reserved, None) is not None:
            log.warning("corpus contains reserved surface %r; occurrences ignored", reserved)
    first_seen = {w: i for i, w in enumerate(counts)}
    kept = sorted(
        (w for w, c in counts.items() if c >= min_count),
        key=lambda w: (-counts[w], first_seen[w]),
    )
    entries = [(w, counts[w]) for w in kept]
    entries.extend((s, 0) for s in SENTINELS)
    index = {w: i for i, (w, _) in enumerate(entries)}
    n = len(entries)
    return Vocabulary(
        entries=entries,
        index=index,
        min_count=min_count,
        unk_id=n - 3,
        root_id=n - 2,
        end_id=n - 1,
    )


@dataclass
class ClassAssignment:
    """Partition of the vocabulary into frequency classes.

    ``word_class[w]`` is the class of word ``w``; ``within_class_index[w]``
    its rank inside that class; ``members[c]`` lists the word ids of class
    ``c`` in ascending id order.
    """

    num_classes: int
    word_class: np.ndarray
    within_class_index: np.ndarray
    members: list[np.ndarray]


def assign_classes(vocab: Vocabulary, num_classes: int) -> ClassAssignment:
    """Bin words into classes of roughly equal cumulative frequency mass.

    Words are walked in id order (descending count by construction).  A new
    class starts once the running mass of the current class reaches
    ``total / num_classes``; the last class absorbs the remainder.  A class
    is also closed early whenever the remaining words would otherwise be too
    few to leave every remaining class non-empty, so ``num_classes == N``
    degenerates to one word per class.  Sentinels carry count 0 and land in
    the final class.
    """
    n = len(vocab)
    if not 1 <= num_classes <= n:
        raise ValueError(f"num_classes must be in [1, {n}], got {num_classes}")
    counts = [c for _, c in vocab.entries]
    target = sum(counts) / num_classes
    word_class = np.zeros(n, dtype=np.int64)
    cid = 0
    mass = 0.0
    for wid in range(n):
        word_class[wid] = cid
        mass += counts[wid]
        words_left = n - wid - 1
        classes_left = num_classes - cid - 1
        if words_left and classes_left and (mass >= target or words_left <= classes_left):
            cid += 1
            mass = 0.0
    within = np.zeros(n, dtype=np.int64)
    members: list[list[int]] = [[] for _ in range(num_classes)]
    for wid in range(n):
        c = int(word_class[wid])
        within[wid] = len(members[c])
        members[c].append(wid)
    return ClassAssignment(
        num_classes=num_classes,
        word_class=word_class,
        within_class_index=within,
        members=[np.asarray(m, dtype=np.int64) for m in members],
    )


@dataclass
class LabelInventory:
    """Dependency relation strings in first-occurrence order, with a reserved root label."""

    labels: list[str]
    index: dict[str, int]
    root_id: int

    def __len__(self) -> int:
        return len(self.labels)

    def lookup(self, label: str) -> int:
        """Map a relation to its id; unseen relations fall back to the root label."""
        got = self.index.get(label)
        if got is None:
            log.debug("unknown dependency label %r mapped to %r", label, ROOT_LABEL)
            return self.root_id
        return got


def collect_labels(sentences: Iterable[Sentence]) -> LabelInventory:
    """Collect distinct DEPREL strings; ``root`` is appended if the corpus lacks it."""
    labels: list[str] = []
    index: dict[str, int] = {}
    for sent in sentences:
        for tok in sent:
            if tok.label not in index:
                index[tok.label] = len(labels)
                labels.append(tok.label)
    if ROOT_LABEL not in index:
        index[ROOT_LABEL] = len(labels)
        labels.append(ROOT_LABEL)
    return LabelInventory(labels=labels, index=index, root_id=index[ROOT_LABEL])


def format_vocab_table(vocab: Vocabulary, classes: ClassAssignment) -> str:
    """Render the vocabulary table: header plus one line per word in id order."""
    lines = [f"VOCAB v1 N={len(vocab)} C={classes.num_classes}"]
    for wid, (surface, count) in enumerate(vocab.entries):
        lines.append(
            f"{surface}\t{count}\t{classes.word_class[wid]}\t{classes.within_class_index[wid]}"
        )
    return "\n".join(lines) + "\n"


def parse_vocab_table(lines: Iterable[str]) -> tuple[Vocabulary, ClassAssignment]:
    """Parse a vocabulary table, reconstructing identical id and class assignments."""
    it = iter(lines)
    try:
        header = next(it).rstrip("\n")
    except StopIteration:
        raise VocabFormatError("empty vocabulary table") from None
    parts = header.split()
    if len(parts) != 4 or parts[0] != "VOCAB" or parts[1] != "v1":
        raise VocabFormatError(f"bad vocabulary header {header!r}")
    try:
        n = int(parts[2].removeprefix("N="))
        num_classes = int(parts[3].removeprefix("C="))
    except ValueError:
        raise VocabFormatError(f"bad vocabulary header {header!r}") from None
    entries: list[tuple[str, int]] = []
    word_class = np.zeros(n, dtype=np.int64)
    within = np.zeros(n, dtype=np.int64)
    for wid in range(n):
        try:
            line = next(it).rstrip("\n")
        except StopIteration:
            raise VocabFormatError(f"vocabulary table truncated at entry {wid}") from None
        fields = line.split("\t")
        if len(fields) != 4:
            raise VocabFormatError(f"bad vocabulary line {line!r}")
        try:
            entries.append((fields[0], int(fields[1])))
            word_class[wid] = int(fields[2])
            within[wid] = int(fields[3])
        except ValueError:
            raise VocabFormatError(f"bad vocabulary line {line!r}") from None
    index = {w: i for i, (w, _) in enumerate(entries)}
    if len(index) != n:
        raise VocabFormatError("duplicate surfaces in vocabulary table")
    for sentinel in SENTINELS:
        if sentinel not in index:
            raise VocabFormatError(f"vocabulary table lacks sentinel {sentinel!r}")
    members: list[list[int]] = [[] for _ in range(num_classes)]
    for wid in range(n):
        c = int(word_class[wid])
        if not 0 <= c < num_classes:
            raise VocabFormatError(f"word {wid} has class {c} outside [0, {num_classes})")
        if within[wid] != len(members[c]):
            raise VocabFormatError(f"word {wid} has inconsistent within-class index")
        members[c].append(wid)
    vocab = Vocabulary(
        entries=entries,
        index=index,
        min_count=0,
        unk_id=index[UNK_SURFACE],
        root_id=index[ROOT_SURFACE],
        end_id=index[END_SURFACE],
    )
    classes = ClassAssignment(
        num_classes=num_classes,
        word_class=word_class,
        within_class_index=within,
        members=[np.asarray(m, dtype=np.int64) for m in members],
    )
    return vocab, classes


def write_vocab_file(vocab: Vocabulary, classes: ClassAssignment, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_vocab_table(vocab, classes))


def read_vocab_file(path) -> tuple[Vocabulary, ClassAssignment]:
    with open(path, encoding="utf-8") as fh:
        return parse_vocab_table(fh)


def format_label_table(labels: LabelInventory) -> str:
    """Render the label table: header plus one relation per line in id order."""
    lines = [f"LABELS v1 M={len(labels)}"]
    lines.extend(labels.labels)
    return "\n".join(lines) + "\n"


def parse_label_table(lines: Iterable[str]) -> LabelInventory:
    it = iter(lines)
    try:
        header = next(it).rstrip("\n")
    except StopIteration:
        raise VocabFormatError("empty label table") from None
    parts = header.split()
    if len(parts) != 3 or parts[0] != "LABELS" or parts[1] != "v1":
        raise VocabFormatError(f"bad label header {header!r}")
    try:
        m = int(parts[2].removeprefix("M="))
    except ValueError:
        raise VocabFormatError(f"bad label header {header!r}") from None
    labels: list[str] = []
    for i in range(m):
        try:
            labels.append(next(it).rstrip("\n"))
        except StopIteration:
            raise VocabFormatError(f"label table truncated at entry {i}") from None
    index = {lab: i for i, lab in enumerate(labels)}
    if len(index) != m:
        raise VocabFormatError("duplicate labels in label table")
    if ROOT_LABEL not in index:
        raise VocabFormatError(f"label table lacks reserved label {ROOT_LABEL!r}")
    return LabelInventory(labels=labels, index=index, root_id=index[ROOT_LABEL])
