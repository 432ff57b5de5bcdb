"""Recurrent language models over dependency trees.

Sequential and dependency-unrolled RNN language models with a class-factored
softmax and hashed n-gram feature connections, sentence scoring by ancestor
factorization, corpus perplexity, and a five-way sentence-completion
evaluation harness.
"""

from .completion import (
    CompletionProblem,
    EvalReport,
    evaluate,
    load_completion_set,
    split_dev_test,
)
from .corpus import (
    ClassAssignment,
    LabelInventory,
    RawToken,
    Vocabulary,
    assign_classes,
    build_vocabulary,
    collect_labels,
    parse_conll,
    read_conll,
)
from .deptree import (
    DependencyTree,
    ancestor_sequence,
    extract_unrolls,
    label_sequence,
    node_stats,
    validate_tree,
)
from .model import (
    HyperParams,
    Model,
    Parameters,
    backward,
    forward_sequence,
    hash_context,
    hidden_step,
    init_params,
    load_model,
    new_model,
    output_distribution,
    save_model,
    word_logprob,
)
from .scoring import (
    SentenceScore,
    perplexity,
    score_dependency,
    score_sentence,
    score_sequential,
)
from .training import TrainConfig, anneal, train, train_epoch, train_sequence

__version__ = "0.1.0"

__all__ = [
    "CompletionProblem",
    "EvalReport",
    "evaluate",
    "load_completion_set",
    "split_dev_test",
    "ClassAssignment",
    "LabelInventory",
    "RawToken",
    "Vocabulary",
    "assign_classes",
    "build_vocabulary",
    "collect_labels",
    "parse_conll",
    "read_conll",
    "DependencyTree",
    "ancestor_sequence",
    "extract_unrolls",
    "label_sequence",
    "node_stats",
    "validate_tree",
    "HyperParams",
    "Model",
    "Parameters",
    "backward",
    "forward_sequence",
    "hash_context",
    "hidden_step",
    "init_params",
    "load_model",
    "new_model",
    "output_distribution",
    "save_model",
    "word_logprob",
    "SentenceScore",
    "perplexity",
    "score_dependency",
    "score_sentence",
    "score_sequential",
    "TrainConfig",
    "anneal",
    "train",
    "train_epoch",
    "train_sequence",
    "__version__",
]
