"""Shared builders and independent oracles for the test suite."""

from __future__ import annotations

import numpy as np

from deprnn.corpus import (
    RawToken,
    assign_classes,
    build_vocabulary,
    collect_labels,
)
from deprnn.model import HyperParams, forward_sequence, new_model


def make_sentence(words, heads, labels=None):
    """Build a RawToken sentence from parallel word/head (1-based) lists."""
    if labels is None:
        labels = ["dep"] * len(words)
        for i, h in enumerate(heads):
            if h == 0:
                labels[i] = "root"
    return [
        RawToken(i + 1, w, h, l)
        for i, (w, h, l) in enumerate(zip(words, heads, labels))
    ]


def vocab_from_counts(counts, min_count=1):
    """Vocabulary whose content words carry exactly the given counts."""
    sentences = []
    for word, count in counts.items():
        sentences.extend([[RawToken(1, word, 0, "root")]] * count)
    return build_vocabulary(sentences, min_count=min_count)


def make_model(
    words=("alpha", "beta", "gamma", "delta", "epsilon"),
    num_classes=3,
    hidden=6,
    num_labels=0,
    label_names=("root", "nsubj", "obj"),
    order=3,
    direct_size=97,
    seed=11,
    mode="seq",
    randomize_direct=None,
):
    """A small model over a synthetic vocabulary (counts descending by position)."""
    counts = {w: len(words) + 5 - i for i, w in enumerate(words)}
    vocab = vocab_from_counts(counts)
    classes = assign_classes(vocab, num_classes)
    labels = None
    if num_labels:
        names = list(label_names)[:num_labels]
        labels = collect_labels([make_sentence(["x"], [0], [n]) for n in names])
        assert len(labels) == num_labels or "root" in names
    hyper = HyperParams(
        hidden=hidden,
        vocab_size=len(vocab),
        num_classes=num_classes,
        num_labels=len(labels) if labels is not None else 0,
        order=order,
        direct_size=direct_size,
        seed=seed,
    )
    model = new_model(hyper, vocab, classes, labels, mode=mode)
    if randomize_direct is not None:
        rng = np.random.default_rng(randomize_direct)
        model.params.direct[:] = rng.uniform(-0.5, 0.5, size=direct_size)
    return model


def random_tree_sentence(rng, n_nodes, label_names=("root", "nsubj", "obj", "amod"),
                         alphabet=None):
    """Random single-rooted tree as a RawToken sentence: node 0 is the root,
    every later node attaches to a uniformly random earlier node."""
    if alphabet is None:
        alphabet = [f"w{i}" for i in range(max(2, n_nodes))]
    words = [str(rng.choice(alphabet)) for _ in range(n_nodes)]
    heads = [0] + [int(rng.integers(0, i)) + 1 for i in range(1, n_nodes)]
    labels = ["root"] + [
        str(rng.choice(label_names[1:])) for _ in range(n_nodes - 1)
    ]
    return make_sentence(words, heads, labels)


def brute_force_paths(parents):
    """Oracle: all root-to-leaf node paths, found by chasing parents up from
    each leaf (independent of the library's depth-first extraction)."""
    n = len(parents)
    has_child = [False] * n
    for p in parents:
        if p >= 0:
            has_child[p] = True
    paths = []
    for leaf in range(n):
        if has_child[leaf]:
            continue
        path = [leaf]
        node = leaf
        while parents[node] >= 0:
            node = parents[node]
            path.append(node)
        paths.append(path[::-1])
    return paths


def finite_difference(model, targets, labels, eps=1e-5):
    """Oracle: central finite differences of the summed cross-entropy with
    respect to every parameter component."""
    grads = {}
    for name, arr in model.params.families().items():
        flat = arr.ravel()
        out = np.zeros_like(flat)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + eps
            up = forward_sequence(model, targets, labels).loss
            flat[i] = orig - eps
            down = forward_sequence(model, targets, labels).loss
            flat[i] = orig
            out[i] = (up - down) / (2.0 * eps)
        grads[name] = out.reshape(arr.shape)
    return grads


def max_relative_error(analytic, numeric, floor=1e-8):
    """Worst-case relative disagreement between two gradient arrays."""
    a = analytic.ravel()
    b = numeric.ravel()
    denom = np.maximum(np.maximum(np.abs(a), np.abs(b)), floor)
    return float(np.max(np.abs(a - b) / denom)) if a.size else 0.0


# A seven-token sentence whose head chain runs saw -> binoculars -> strong -> very.
FIXTURE_CONLL = """\
1\tI\t_\t_\t_\t_\t2\tnsubj\t_\t_
2\tsaw\t_\t_\t_\t_\t0\troot\t_\t_
3\thim\t_\t_\t_\t_\t2\tdobj\t_\t_
4\twith\t_\t_\t_\t_\t7\tcase\t_\t_
5\tvery\t_\t_\t_\t_\t6\tadvmod\t_\t_
6\tstrong\t_\t_\t_\t_\t7\tamod\t_\t_
7\tbinoculars\t_\t_\t_\t_\t2\tnmod\t_\t_
"""
