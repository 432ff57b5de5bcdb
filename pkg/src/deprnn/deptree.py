"""Dependency tree validation, root-to-leaf unrolls, and path statistics."""

from __future__ import annotations

from dataclasses import dataclass

from .corpus import LabelInventory, Sentence, Vocabulary


class TreeError(ValueError):
    """A sentence does not form a valid dependency tree."""


class NoRoot(TreeError):
    pass


class MultipleRoots(TreeError):
    pass


class CycleDetected(TreeError):
    pass


@dataclass
class DependencyTree:
    """A validated dependency tree.

    Nodes are indexed by surface position (0-based).  ``parents[i]`` is the
    node index of the head of node ``i`` (-1 for the root); ``children[i]``
    lists the dependents of node ``i`` in ascending surface position;
    ``label_ids[i]`` is the relation on the edge from the head of ``i`` down
    to ``i`` (for the root, its relation to the artificial root).
    """

    surfaces: list[str]
    word_ids: list[int]
    label_ids: list[int]
    parents: list[int]
    children: list[list[int]]
    root_index: int

    def __len__(self) -> int:
        return len(self.parents)


def validate_tree(
    sentence: Sentence,
    vocab: Vocabulary,
    labels: LabelInventory | None = None,
) -> DependencyTree:
    """Check the head structure of a sentence and map it to word and label ids.

    Checks run in order: exactly one token attached to the artificial root
    (NoRoot / MultipleRoots), then reachability of every token from the root
    (CycleDetected, which also covers disconnected fragments — every
    unreachable fragment contains a head cycle).  Error messages name the
    offending 1-based positions.  When ``labels`` is None all label ids are
    0 placeholders (label features unused).
    """
    n = len(sentence)
    if n == 0:
        raise NoRoot("empty sentence has no root")
    for tok in sentence:
        if not 0 <= tok.head <= n:
            raise TreeError(f"position {tok.position}: HEAD {tok.head} out of range")
    roots = [tok.position for tok in sentence if tok.head == 0]
    if not roots:
        raise NoRoot("no token is attached to the artificial root")
    if len(roots) > 1:
        raise MultipleRoots(f"tokens at positions {roots} are all attached to the root")
    parents = [tok.head - 1 for tok in sentence]
    children: list[list[int]] = [[] for _ in range(n)]
    for i, p in enumerate(parents):
        if p >= 0:
            children[p].append(i)
    root_index = roots[0] - 1
    reached = [False] * n
    stack = [root_index]
    while stack:
        node = stack.pop()
        reached[node] = True
        stack.extend(children[node])
    if not all(reached):
        bad = [i + 1 for i, ok in enumerate(reached) if not ok]
        raise CycleDetected(f"positions {bad} are unreachable from the root (head cycle)")
    word_ids = [vocab.lookup(tok.surface) for tok in sentence]
    if labels is None:
        label_ids = [0] * n
    else:
        label_ids = [labels.lookup(tok.label) for tok in sentence]
    return DependencyTree(
        surfaces=[tok.surface for tok in sentence],
        word_ids=word_ids,
        label_ids=label_ids,
        parents=parents,
        children=children,
        root_index=root_index,
    )


def extract_unrolls(tree: DependencyTree) -> list[list[int]]:
    """All root-to-leaf node paths, in depth-first order with children visited
    by ascending surface position.  A single-node tree yields one length-1 path."""
    out: list[list[int]] = []
    stack: list[tuple[int, list[int]]] = [(tree.root_index, [tree.root_index])]
    while stack:
        node, path = stack.pop()
        kids = tree.children[node]
        if not kids:
            out.append(path)
            continue
        for kid in reversed(kids):
            stack.append((kid, path + [kid]))
    return out


@dataclass
class NodeStats:
    """Per-node unroll multiplicity ``n_i`` and the update discount ``1 / n_i``."""

    unroll_counts: list[int]
    discounts: list[float]


def node_stats(tree: DependencyTree) -> NodeStats:
    """Count the root-to-leaf paths through each node (= leaves in its subtree)."""
    n = len(tree)
    counts = [0] * n
    # Walk nodes in reverse depth-first preorder so every node is processed
    # after all of its children.
    order: list[int] = []
    stack = [tree.root_index]
    while stack:
        node = stack.pop()
        order.append(node)
        stack.extend(tree.children[node])
    for node in reversed(order):
        kids = tree.children[node]
        counts[node] = sum(counts[k] for k in kids) if kids else 1
    return NodeStats(unroll_counts=counts, discounts=[1.0 / c for c in counts])


def ancestor_sequence(tree: DependencyTree, node: int) -> list[int]:
    """Nodes on the path from the root down to the parent of ``node`` (root first).

    The root itself has an empty ancestor sequence.
    """
    out = []
    p = tree.parents[node]
    while p >= 0:
        out.append(p)
        p = tree.parents[p]
    out.reverse()
    return out


def label_sequence(tree: DependencyTree, node: int) -> list[int]:
    """Incoming-edge label ids along the path root..``node`` (one per node).

    The first element is the root token's own relation to the artificial
    root; the last is the relation on the edge into ``node``.
    """
    nodes = ancestor_sequence(tree, node)
    nodes.append(node)
    return [tree.label_ids[k] for k in nodes]


def unroll_dump(tree: DependencyTree) -> str:
    """Human-readable unrolls: one line per path, surfaces joined by arrows."""
    lines = ["→".join(tree.surfaces[i] for i in path) for path in extract_unrolls(tree)]
    return "\n".join(lines) + ("\n" if lines else "")
