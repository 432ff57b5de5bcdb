"""Recurrent language model core: parameters, forward pass, gradients, model files.

The network follows the classic simple-recurrent design with a class-factored
output layer and hashed n-gram ("direct") feature connections:

    state    s(t) = sigmoid(R s(t-1) + E[x(t)] + L[f(t)])
    classes  P(c | t)        = softmax(Vc s(t) + Gc[:, f(t)] + direct features)
    words    P(w | c(w), t)  = softmax over the members of c(w), analogously

where x(t) is the input word, f(t) the optional dependency label paired with
the step, and P(w) = P(c(w)) * P(w | c(w)).  Direct features hash the most
recent input words into a shared weight array, one feature per n-gram order;
hash collisions are accepted silently.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import BinaryIO, Sequence

import numpy as np

from .corpus import (
    ClassAssignment,
    LabelInventory,
    Vocabulary,
    format_label_table,
    format_vocab_table,
    parse_label_table,
    parse_vocab_table,
)

# Stability bounds: hidden-layer preactivations are clipped to +-PREACT_CLIP
# before the sigmoid, gradient components to +-GRAD_CLIP before any update.
PREACT_CLIP = 50.0
GRAD_CLIP = 15.0

# Odd-prime multipliers for the n-gram feature hash (primes above 1e6, fixed
# forever: changing them silently remaps every trained direct weight).
HASH_PRIMES = (
    1000003, 1000033, 1000037, 1000039,
    1000081, 1000099, 1000117, 1000121,
    1000133, 1000151, 1000159, 1000171,
    1000183, 1000187, 1000193, 1000199,
)

MODEL_MAGIC = "DEPRNN v1"
MODES = ("seq", "dep", "ldep")


class ModelFormatError(ValueError):
    """Malformed or truncated model file."""


@dataclass(frozen=True)
class HyperParams:
    """Network dimensions.  ``num_labels`` 0 disables label features; ``order``
    1 leaves only the order-1 bias feature of the direct connections."""

    hidden: int
    vocab_size: int
    num_classes: int
    num_labels: int = 0
    order: int = 1
    direct_size: int = 1
    seed: int = 1

    def __post_init__(self) -> None:
        if self.hidden < 1:
            raise ValueError(f"hidden must be >= 1, got {self.hidden}")
        if self.vocab_size < 1:
            raise ValueError(f"vocab_size must be >= 1, got {self.vocab_size}")
        if not 1 <= self.num_classes <= self.vocab_size:
            raise ValueError(
                f"num_classes must be in [1, {self.vocab_size}], got {self.num_classes}"
            )
        if self.num_labels < 0:
            raise ValueError(f"num_labels must be >= 0, got {self.num_labels}")
        if not 1 <= self.order <= len(HASH_PRIMES):
            raise ValueError(f"order must be in [1, {len(HASH_PRIMES)}], got {self.order}")
        if self.direct_size < 1:
            raise ValueError(f"direct_size must be >= 1, got {self.direct_size}")


@dataclass
class Parameters:
    """All weight arrays, float64 throughout."""

    embed: np.ndarray         # (N, H) input word embeddings
    recurrent: np.ndarray     # (H, H) hidden-to-hidden
    class_out: np.ndarray     # (C, H) hidden-to-class logits
    word_out: np.ndarray      # (N, H) hidden-to-word logits (rows used per class)
    label_hidden: np.ndarray  # (M, H) label-to-hidden
    label_class: np.ndarray   # (C, M) label-to-class logits
    label_word: np.ndarray    # (N, M) label-to-word logits
    direct: np.ndarray        # (D,) hashed n-gram feature weights

    def families(self) -> dict[str, np.ndarray]:
        return {
            "embed": self.embed,
            "recurrent": self.recurrent,
            "class_out": self.class_out,
            "word_out": self.word_out,
            "label_hidden": self.label_hidden,
            "label_class": self.label_class,
            "label_word": self.label_word,
            "direct": self.direct,
        }

    def copy(self) -> "Parameters":
        return Parameters(**{name: arr.copy() for name, arr in self.families().items()})


def init_params(hyper: HyperParams) -> Parameters:
    """Seeded initialization: the seven dense families are filled i.i.d.
    uniform on [-0.1, 0.1] in the fixed order embed, recurrent, class_out,
    word_out, label_hidden, label_class, label_word (each as one contiguous
    row-major draw); the direct array starts at zero."""
    rng = np.random.default_rng(hyper.seed)
    h, n, c, m = hyper.hidden, hyper.vocab_size, hyper.num_classes, hyper.num_labels

    def draw(*shape: int) -> np.ndarray:
        return rng.uniform(-0.1, 0.1, size=shape)

    return Parameters(
        embed=draw(n, h),
        recurrent=draw(h, h),
        class_out=draw(c, h),
        word_out=draw(n, h),
        label_hidden=draw(m, h),
        label_class=draw(c, m),
        label_word=draw(n, m),
        direct=np.zeros(hyper.direct_size),
    )


@dataclass
class Model:
    """Parameters bundled with the tables that give ids meaning."""

    hyper: HyperParams
    params: Parameters
    vocab: Vocabulary
    classes: ClassAssignment
    labels: LabelInventory | None = None
    mode: str = "seq"


def new_model(
    hyper: HyperParams,
    vocab: Vocabulary,
    classes: ClassAssignment,
    labels: LabelInventory | None = None,
    mode: str = "seq",
) -> Model:
    """Initialize a model, checking that the tables match the dimensions."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if len(vocab) != hyper.vocab_size:
        raise ValueError(f"vocabulary size {len(vocab)} != N={hyper.vocab_size}")
    if classes.num_classes != hyper.num_classes:
        raise ValueError(f"class count {classes.num_classes} != C={hyper.num_classes}")
    if hyper.num_labels:
        if labels is None or len(labels) != hyper.num_labels:
            got = None if labels is None else len(labels)
            raise ValueError(f"label inventory size {got} != M={hyper.num_labels}")
    return Model(hyper, init_params(hyper), vocab, classes, labels, mode)


def hash_context(window: Sequence[int], order: int, size: int) -> int:
    """Hash up to ``order - 1`` context word ids into ``[0, size)``.

    ``window`` holds the most recent input ids, most recent last.  The hash
    is ``P0 * order + sum_k Pk * (id_k + 1)`` mod ``size`` where ``id_k`` is
    the k-th most recent id, so order 1 is a context-free bias feature.
    """
    if not 1 <= order <= len(window) + 1:
        raise ValueError(f"order {order} needs {order - 1} context ids, window has {len(window)}")
    h = HASH_PRIMES[0] * order
    for k in range(1, order):
        h += HASH_PRIMES[k] * (window[-k] + 1)
    return h % size


def _direct_regions(direct_size: int) -> tuple[int, int, int, int]:
    """(class_start, class_size, word_start, word_size): the direct array is
    split in half between class features and word features; a size-1 array
    degenerates to both regions aliasing the whole array."""
    half = direct_size // 2
    if half == 0:
        return 0, direct_size, 0, direct_size
    return 0, half, half, direct_size - half


def _class_direct_indices(hyper: HyperParams, window: tuple[int, ...]) -> list[np.ndarray]:
    """Per usable n-gram order, the direct indices feeding each class logit."""
    start, size, _, _ = _direct_regions(hyper.direct_size)
    offsets = np.arange(hyper.num_classes)
    out = []
    for order in range(1, min(hyper.order, len(window) + 1) + 1):
        h = hash_context(window, order, size)
        out.append(start + (h + offsets) % size)
    return out


def _word_direct_indices(
    hyper: HyperParams, window: tuple[int, ...], class_id: int, n_members: int
) -> list[np.ndarray]:
    """Per usable order, the direct indices feeding each within-class word
    logit; keyed by the class so different classes use different features."""
    _, _, start, size = _direct_regions(hyper.direct_size)
    offsets = np.arange(n_members)
    out = []
    for order in range(1, min(hyper.order, len(window) + 1) + 1):
        h = (hash_context(window, order, size) + HASH_PRIMES[0] * (class_id + 1)) % size
        out.append(start + (h + offsets) % size)
    return out


def _sigmoid(a: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-a))


def _preactivation(
    params: Parameters, num_labels: int, s_prev: np.ndarray, word: int, label: int | None
) -> np.ndarray:
    a = params.recurrent @ s_prev + params.embed[word]
    if label is not None and num_labels:
        a = a + params.label_hidden[label]
    return a


def hidden_step(model: Model, s_prev: np.ndarray, word: int, label: int | None = None) -> np.ndarray:
    """One recurrence step; preactivations are clipped before the sigmoid, so
    runaway inputs saturate instead of overflowing."""
    a = _preactivation(model.params, model.hyper.num_labels, s_prev, word, label)
    return _sigmoid(np.clip(a, -PREACT_CLIP, PREACT_CLIP))


def _log_softmax(z: np.ndarray) -> np.ndarray:
    x = z - z.max()
    return x - np.log(np.exp(x).sum())


def _class_logits(model: Model, s: np.ndarray, window: tuple[int, ...], label: int | None) -> np.ndarray:
    z = model.params.class_out @ s
    if label is not None and model.hyper.num_labels:
        z = z + model.params.label_class[:, label]
    for idx in _class_direct_indices(model.hyper, window):
        z = z + model.params.direct[idx]
    return z


def _word_logits(
    model: Model, s: np.ndarray, window: tuple[int, ...], label: int | None, class_id: int
) -> tuple[np.ndarray, np.ndarray]:
    members = model.classes.members[class_id]
    z = model.params.word_out[members] @ s
    if label is not None and model.hyper.num_labels:
        z = z + model.params.label_word[members, label]
    for idx in _word_direct_indices(model.hyper, window, class_id, len(members)):
        z = z + model.params.direct[idx]
    return z, members


@dataclass
class OutputDistribution:
    """Class distribution and the word distribution within one target class."""

    class_probs: np.ndarray
    word_probs: np.ndarray
    members: np.ndarray


def output_distribution(
    model: Model,
    s: np.ndarray,
    window: tuple[int, ...] = (),
    label: int | None = None,
    target_class: int = 0,
) -> OutputDistribution:
    """Softmax over classes and over the members of ``target_class``."""
    lc = _log_softmax(_class_logits(model, s, window, label))
    zw, members = _word_logits(model, s, window, label, target_class)
    return OutputDistribution(np.exp(lc), np.exp(_log_softmax(zw)), members)


def word_logprob(
    model: Model,
    s: np.ndarray,
    window: tuple[int, ...],
    label: int | None,
    target: int,
) -> float:
    """log P(target) = log P(class of target) + log P(target | its class)."""
    cid = int(model.classes.word_class[target])
    rank = int(model.classes.within_class_index[target])
    lc = _log_softmax(_class_logits(model, s, window, label))
    zw, _ = _word_logits(model, s, window, label, cid)
    return float(lc[cid] + _log_softmax(zw)[rank])


def _context_window(inputs: list[int], t: int, order: int) -> tuple[int, ...]:
    """The most recent consumed input ids (at most order - 1, most recent last)."""
    if order <= 1:
        return ()
    return tuple(inputs[max(0, t - order + 2): t + 1])


class SequenceRun:
    """Step-by-step forward pass over one token sequence.

    The network consumes the root sentinel followed by all targets but the
    last, so target t is predicted from the state after t inputs.  Steps are
    advanced one at a time and all per-step quantities are cached; between
    steps the caller may update the parameters (online training), in which
    case each step reflects the parameter values current when it ran.
    """

    def __init__(self, model: Model, targets: Sequence[int], labels: Sequence[int] | None = None):
        self.model = model
        self.targets = list(targets)
        use_labels = labels is not None and model.hyper.num_labels > 0
        self.labels = list(labels) if use_labels else None
        if self.labels is not None and len(self.labels) != len(self.targets):
            raise ValueError(
                f"{len(self.labels)} labels for {len(self.targets)} targets"
            )
        self.inputs = [model.vocab.root_id] + self.targets[:-1]
        t_total = len(self.targets)
        h = model.hyper.hidden
        self.states = np.zeros((t_total + 1, h))
        self.gate_masks = np.zeros((t_total, h), dtype=bool)
        self.windows: list[tuple[int, ...]] = []
        self.class_probs: list[np.ndarray] = []
        self.word_probs: list[np.ndarray] = []
        self.class_ids: list[int] = []
        self.ranks: list[int] = []
        self.members: list[np.ndarray] = []
        self.logprobs = np.zeros(t_total)
        self._next = 0

    def __len__(self) -> int:
        return len(self.targets)

    @property
    def done(self) -> bool:
        return self._next >= len(self.targets)

    @property
    def loss(self) -> float:
        """Summed cross-entropy (nats) over the steps advanced so far."""
        return -float(self.logprobs[: self._next].sum())

    def advance(self) -> float:
        """Consume the next input, predict its target; returns log P(target)."""
        t = self._next
        model = self.model
        label = self.labels[t] if self.labels is not None else None
        a = _preactivation(model.params, model.hyper.num_labels, self.states[t], self.inputs[t], label)
        self.gate_masks[t] = np.abs(a) < PREACT_CLIP
        self.states[t + 1] = _sigmoid(np.clip(a, -PREACT_CLIP, PREACT_CLIP))
        window = _context_window(self.inputs, t, model.hyper.order)
        self.windows.append(window)
        target = self.targets[t]
        cid = int(model.classes.word_class[target])
        rank = int(model.classes.within_class_index[target])
        s = self.states[t + 1]
        lc = _log_softmax(_class_logits(model, s, window, label))
        zw, members = _word_logits(model, s, window, label, cid)
        lw = _log_softmax(zw)
        self.class_probs.append(np.exp(lc))
        self.word_probs.append(np.exp(lw))
        self.class_ids.append(cid)
        self.ranks.append(rank)
        self.members.append(members)
        logp = float(lc[cid] + lw[rank])
        self.logprobs[t] = logp
        self._next = t + 1
        return logp

    def run(self) -> "SequenceRun":
        while not self.done:
            self.advance()
        return self

    def gradient_terms(self, t: int, bptt_steps: int) -> "PositionGradient":
        """Loss gradient pieces for position ``t``, truncated at ``bptt_steps``.

        Uses the cached forward quantities of step ``t`` and the parameters
        current at call time, so in online training call this for the step
        just advanced, before applying its update.
        """
        if not 0 <= t < self._next:
            raise ValueError(f"step {t} has not been advanced yet")
        if bptt_steps < 1:
            raise ValueError(f"bptt_steps must be >= 1, got {bptt_steps}")
        model = self.model
        class_err = self.class_probs[t].copy()
        class_err[self.class_ids[t]] -= 1.0
        word_err = self.word_probs[t].copy()
        word_err[self.ranks[t]] -= 1.0
        members = self.members[t]
        params = model.params
        ds = params.class_out.T @ class_err + params.word_out[members].T @ word_err
        recurrent: list[tuple[np.ndarray, np.ndarray, int, int | None]] = []
        for k in range(bptt_steps):
            tau = t - k
            if tau < 0:
                break
            s = self.states[tau + 1]
            delta = ds * s * (1.0 - s)
            delta[~self.gate_masks[tau]] = 0.0
            recurrent.append(
                (
                    delta,
                    self.states[tau],
                    self.inputs[tau],
                    self.labels[tau] if self.labels is not None else None,
                )
            )
            if tau == 0 or k + 1 == bptt_steps:
                break
            ds = params.recurrent.T @ delta
        cid = self.class_ids[t]
        return PositionGradient(
            class_err=class_err,
            word_err=word_err,
            state=self.states[t + 1],
            members=members,
            label=self.labels[t] if self.labels is not None else None,
            class_direct=_class_direct_indices(model.hyper, self.windows[t]),
            word_direct=_word_direct_indices(model.hyper, self.windows[t], cid, len(members)),
            recurrent=recurrent,
        )


def forward_sequence(model: Model, targets: Sequence[int], labels: Sequence[int] | None = None) -> SequenceRun:
    """Full forward pass with frozen parameters; returns the completed run."""
    return SequenceRun(model, targets, labels).run()


@dataclass
class PositionGradient:
    """Gradient pieces of one position's cross-entropy, before clipping.

    ``recurrent`` holds one (delta, previous state, input id, label id)
    entry per unfolded time step, newest first.
    """

    class_err: np.ndarray
    word_err: np.ndarray
    state: np.ndarray
    members: np.ndarray
    label: int | None
    class_direct: list[np.ndarray]
    word_direct: list[np.ndarray]
    recurrent: list[tuple[np.ndarray, np.ndarray, int, int | None]]


def apply_position_update(params: Parameters, terms: PositionGradient, rate: float) -> None:
    """One online SGD update: clip each gradient piece to +-GRAD_CLIP, scale
    by ``rate``, subtract.  Direct weights are touched sparsely."""
    c = GRAD_CLIP
    params.class_out -= rate * np.clip(np.outer(terms.class_err, terms.state), -c, c)
    params.word_out[terms.members] -= rate * np.clip(np.outer(terms.word_err, terms.state), -c, c)
    class_err = np.clip(terms.class_err, -c, c)
    word_err = np.clip(terms.word_err, -c, c)
    if terms.label is not None:
        params.label_class[:, terms.label] -= rate * class_err
        params.label_word[terms.members, terms.label] -= rate * word_err
    for idx in terms.class_direct:
        np.subtract.at(params.direct, idx, rate * class_err)
    for idx in terms.word_direct:
        np.subtract.at(params.direct, idx, rate * word_err)
    for delta, s_prev, input_id, label_id in terms.recurrent:
        clipped = np.clip(delta, -c, c)
        params.recurrent -= rate * np.clip(np.outer(delta, s_prev), -c, c)
        params.embed[input_id] -= rate * clipped
        if label_id is not None:
            params.label_hidden[label_id] -= rate * clipped


@dataclass
class Gradients:
    """Dense loss gradients, one array per parameter family."""

    embed: np.ndarray
    recurrent: np.ndarray
    class_out: np.ndarray
    word_out: np.ndarray
    label_hidden: np.ndarray
    label_class: np.ndarray
    label_word: np.ndarray
    direct: np.ndarray

    @classmethod
    def zeros_like(cls, params: Parameters) -> "Gradients":
        return cls(**{name: np.zeros_like(arr) for name, arr in params.families().items()})

    def families(self) -> dict[str, np.ndarray]:
        return {
            "embed": self.embed,
            "recurrent": self.recurrent,
            "class_out": self.class_out,
            "word_out": self.word_out,
            "label_hidden": self.label_hidden,
            "label_class": self.label_class,
            "label_word": self.label_word,
            "direct": self.direct,
        }


def backward(model: Model, run: SequenceRun, bptt_steps: int) -> Gradients:
    """Gradients of the summed cross-entropy of a completed run.

    Each position's error is propagated through at most ``bptt_steps``
    recurrence steps (1 = no unfolding beyond the current step).  Components
    are clipped to +-GRAD_CLIP after accumulation.  Intended for verification
    and small models: the arrays are dense, including the direct family.
    """
    if not run.done:
        raise ValueError("backward needs a fully advanced run")
    g = Gradients.zeros_like(model.params)
    for t in range(len(run)):
        terms = run.gradient_terms(t, bptt_steps)
        g.class_out += np.outer(terms.class_err, terms.state)
        g.word_out[terms.members] += np.outer(terms.word_err, terms.state)
        if terms.label is not None:
            g.label_class[:, terms.label] += terms.class_err
            g.label_word[terms.members, terms.label] += terms.word_err
        for idx in terms.class_direct:
            np.add.at(g.direct, idx, terms.class_err)
        for idx in terms.word_direct:
            np.add.at(g.direct, idx, terms.word_err)
        for delta, s_prev, input_id, label_id in terms.recurrent:
            g.recurrent += np.outer(delta, s_prev)
            g.embed[input_id] += delta
            if label_id is not None:
                g.label_hidden[label_id] += delta
    for arr in g.families().values():
        np.clip(arr, -GRAD_CLIP, GRAD_CLIP, out=arr)
    return g


_FAMILY_ORDER = (
    "embed", "recurrent", "class_out", "word_out",
    "label_hidden", "label_class", "label_word", "direct",
)


def write_model(model: Model, fh: BinaryIO) -> None:
    """Serialize: text header and tables, then ``BINARY`` and the raw weights.

    Weights are little-endian float64, row-major, in the fixed family order
    embed, recurrent, class_out, word_out, label_hidden, label_class,
    label_word, direct.
    """
    hyper = model.hyper
    head = io.StringIO()
    head.write(MODEL_MAGIC + "\n")
    head.write(f"H={hyper.hidden}\n")
    head.write(f"N={hyper.vocab_size}\n")
    head.write(f"C={hyper.num_classes}\n")
    head.write(f"M={hyper.num_labels}\n")
    head.write(f"order={hyper.order}\n")
    head.write(f"D={hyper.direct_size}\n")
    head.write(f"mode={model.mode}\n")
    head.write(format_vocab_table(model.vocab, model.classes))
    if model.labels is not None:
        head.write(format_label_table(model.labels))
    else:
        head.write("LABELS v1 M=0\n")
    head.write("BINARY\n")
    fh.write(head.getvalue().encode("utf-8"))
    for name in _FAMILY_ORDER:
        arr = model.params.families()[name]
        fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def _read_text_line(fh: BinaryIO, what: str) -> str:
    line = fh.readline()
    if not line.endswith(b"\n"):
        raise ModelFormatError(f"truncated model file while reading {what}")
    return line.decode("utf-8").rstrip("\n")


def read_model(fh: BinaryIO) -> Model:
    """Deserialize a model file; rejects bad magic, inconsistent dimensions,
    and truncated or oversized weight sections."""
    magic = _read_text_line(fh, "magic")
    if magic != MODEL_MAGIC:
        raise ModelFormatError(f"bad magic {magic!r}, expected {MODEL_MAGIC!r}")
    fields = {}
    for key in ("H", "N", "C", "M", "order", "D", "mode"):
        line = _read_text_line(fh, f"field {key}")
        if not line.startswith(key + "="):
            raise ModelFormatError(f"expected {key}= line, got {line!r}")
        fields[key] = line[len(key) + 1:]
    try:
        hyper = HyperParams(
            hidden=int(fields["H"]),
            vocab_size=int(fields["N"]),
            num_classes=int(fields["C"]),
            num_labels=int(fields["M"]),
            order=int(fields["order"]),
            direct_size=int(fields["D"]),
        )
    except ValueError as err:
        raise ModelFormatError(f"bad header field: {err}") from None
    mode = fields["mode"]
    if mode not in MODES:
        raise ModelFormatError(f"bad mode {mode!r}, expected one of {MODES}")

    vocab_lines = [_read_text_line(fh, "vocabulary header")]
    vocab_header = vocab_lines[0].split()
    if len(vocab_header) != 4 or vocab_header[0] != "VOCAB":
        raise ModelFormatError(f"expected vocabulary table, got {vocab_lines[0]!r}")
    for i in range(hyper.vocab_size):
        vocab_lines.append(_read_text_line(fh, f"vocabulary entry {i}"))
    try:
        vocab, classes = parse_vocab_table(vocab_lines)
    except ValueError as err:
        raise ModelFormatError(str(err)) from None
    if len(vocab) != hyper.vocab_size or classes.num_classes != hyper.num_classes:
        raise ModelFormatError("vocabulary table does not match the header dimensions")

    label_lines = [_read_text_line(fh, "label header")]
    if not label_lines[0].startswith("LABELS "):
        raise ModelFormatError(f"expected label table, got {label_lines[0]!r}")
    for i in range(hyper.num_labels):
        label_lines.append(_read_text_line(fh, f"label entry {i}"))
    if hyper.num_labels:
        try:
            labels = parse_label_table(label_lines)
        except ValueError as err:
            raise ModelFormatError(str(err)) from None
    else:
        labels = None

    marker = _read_text_line(fh, "BINARY marker")
    if marker != "BINARY":
        raise ModelFormatError(f"expected BINARY marker, got {marker!r}")
    blob = fh.read()
    h, n, c, m, d = hyper.hidden, hyper.vocab_size, hyper.num_classes, hyper.num_labels, hyper.direct_size
    shapes = {
        "embed": (n, h),
        "recurrent": (h, h),
        "class_out": (c, h),
        "word_out": (n, h),
        "label_hidden": (m, h),
        "label_class": (c, m),
        "label_word": (n, m),
        "direct": (d,),
    }
    expected = sum(int(np.prod(s)) for s in shapes.values()) * 8
    if len(blob) < expected:
        raise ModelFormatError(
            f"truncated weight section: {len(blob)} bytes, expected {expected}"
        )
    if len(blob) > expected:
        raise ModelFormatError(
            f"weight section size mismatch: {len(blob)} bytes, expected {expected}"
        )
    arrays = {}
    offset = 0
    for name in _FAMILY_ORDER:
        shape = shapes[name]
        count = int(np.prod(shape))
        arrays[name] = (
            np.frombuffer(blob, dtype="<f8", count=count, offset=offset)
            .astype(np.float64)
            .reshape(shape)
        )
        offset += count * 8
    return Model(hyper, Parameters(**arrays), vocab, classes, labels, mode)


def save_model(model: Model, path) -> None:
    with open(path, "wb") as fh:
        write_model(model, fh)


def load_model(path) -> Model:
    with open(path, "rb") as fh:
        return read_model(fh)
