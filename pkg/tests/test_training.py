"""Online SGD behaviour: ledgers, discounts, annealing and the train loop."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import make_model, make_sentence
from deprnn.model import forward_sequence
from deprnn.training import (
    TrainConfig,
    TrainState,
    anneal,
    format_history,
    prepare_corpus,
    train,
    train_epoch,
    train_sequence,
)


def snapshot(model):
    return {name: arr.copy() for name, arr in model.params.families().items()}


def params_equal(model, snap):
    return all(np.array_equal(arr, snap[name])
               for name, arr in model.params.families().items())


class TestTrainConfig:
    def test_rejects_bad_values(self):
        with pytest.raises(ValueError):
            TrainConfig(mode="tree")
        with pytest.raises(ValueError):
            TrainConfig(lr=-0.1)
        with pytest.raises(ValueError):
            TrainConfig(decay=0.0)
        with pytest.raises(ValueError):
            TrainConfig(bptt_steps=0)
        with pytest.raises(ValueError):
            TrainConfig(max_epochs=-1)


class TestTrainSequence:
    def test_zero_rate_is_exact_noop(self):
        model = make_model(randomize_direct=5)
        before = snapshot(model)
        train_sequence(model, [1, 2, 3], lr=0.0)
        assert params_equal(model, before)
        train_sequence(model, [1, 2, 3], discounts=[0.0, 0.0, 0.0], lr=0.3)
        assert params_equal(model, before)

    def test_nonzero_rate_changes_params(self):
        model = make_model()
        before = snapshot(model)
        train_sequence(model, [1, 2], lr=0.1)
        assert not params_equal(model, before)

    def test_zero_rate_loss_equals_frozen_forward(self):
        model = make_model(randomize_direct=13)
        targets = [0, 3, 1, 2]
        expect = forward_sequence(model, targets).loss
        result = train_sequence(model, targets, lr=0.0)
        assert_allclose(result.loss, expect, atol=1e-12)

    def test_losses_are_measured_before_each_update(self):
        # position 0 is scored before anything has moved, so it matches the
        # frozen forward pass exactly; later positions see earlier updates
        # and drift away from it
        model = make_model(randomize_direct=13)
        targets = [0, 3, 1, 2]
        frozen = forward_sequence(model, targets).logprobs
        result = train_sequence(model, targets, lr=0.2)
        assert result.logprobs[0] == frozen[0]
        assert not np.allclose(result.logprobs[1:], frozen[1:])

    def test_repeated_updates_memorize(self):
        model = make_model(hidden=8, order=3, direct_size=211)
        targets = [2, 5, 1, 4, 0]
        first = train_sequence(model, targets, lr=0.5).loss
        last = first
        for _ in range(30):
            last = train_sequence(model, targets, lr=0.5).loss
        assert last < 0.5 * first

    def test_ledger_records_every_position(self):
        model = make_model()
        ledger = []
        train_sequence(model, [4, 1], discounts=[1.0, 0.25], lr=0.2, ledger=ledger)
        root = model.vocab.root_id
        assert ledger == [(0, root, 4, 0.2), (1, 4, 1, 0.2 * 0.25)]


class TestPrepareCorpus:
    def test_sequential_appends_end(self):
        model = make_model(words=("a", "b"))
        sents = [make_sentence(["a", "b"], [0, 1])]
        prepared = prepare_corpus(sents, model.vocab, None, "seq")
        assert len(prepared) == 1
        (seq,) = prepared[0].sequences
        a, b = model.vocab.lookup("a"), model.vocab.lookup("b")
        assert seq.targets == [a, b, model.vocab.end_id]
        assert seq.discounts is None and seq.labels is None and seq.nodes is None

    def test_dependency_unrolls_with_discounts(self):
        model = make_model(words=("a", "b", "c"))
        # a is the root with two leaf children
        sents = [make_sentence(["a", "b", "c"], [0, 1, 1])]
        prepared = prepare_corpus(sents, model.vocab, None, "dep")
        seqs = prepared[0].sequences
        assert [s.nodes for s in seqs] == [[0, 1], [0, 2]]
        assert [s.discounts for s in seqs] == [[0.5, 1.0], [0.5, 1.0]]
        a = model.vocab.lookup("a")
        assert [s.targets for s in seqs] == [[a, model.vocab.lookup("b")],
                                             [a, model.vocab.lookup("c")]]
        assert all(s.labels is None for s in seqs)

    def test_labelled_mode_carries_labels(self):
        labels = ("root", "l", "r")
        model = make_model(words=("a", "b"), num_labels=3, label_names=labels,
                           mode="ldep")
        sents = [make_sentence(["a", "b"], [0, 1], ["root", "l"])]
        prepared = prepare_corpus(sents, model.vocab, model.labels, "ldep")
        (seq,) = prepared[0].sequences
        assert seq.labels == [model.labels.lookup("root"), model.labels.lookup("l")]

    def test_invalid_trees_skipped_with_warning(self, caplog):
        model = make_model(words=("a", "b"))
        good = make_sentence(["a"], [0])
        bad = make_sentence(["a", "b"], [2, 1])
        with caplog.at_level("WARNING"):
            prepared = prepare_corpus([bad, good], model.vocab, None, "dep")
        assert len(prepared) == 1
        assert "skipp" in caplog.text


class TestTrainEpoch:
    def test_empty_corpus(self):
        model = make_model()
        stats = train_epoch(model, [], TrainConfig(), lr=0.1, epoch=1)
        assert stats.token_count == 0
        assert stats.train_entropy == 0.0

    def test_uniform_model_entropy_is_log2_vocab(self):
        # lr=0 keeps the all-zero single-class model uniform for the whole
        # epoch, so the measured entropy is exactly log2(N) per token
        model = make_model(words=("a", "b", "c"), num_classes=1)
        for arr in model.params.families().values():
            arr[:] = 0.0
        sents = [make_sentence(["a", "b", "c"], [0, 1, 1])]
        prepared = prepare_corpus(sents, model.vocab, None, "dep")
        stats = train_epoch(model, prepared, TrainConfig(mode="dep"), lr=0.0, epoch=1)
        assert stats.token_count == 3          # nodes, not unroll positions
        n = model.hyper.vocab_size
        assert_allclose(stats.train_entropy, math.log2(n), atol=1e-12)

    def test_sequential_counts_end_token(self):
        model = make_model(words=("a", "b"))
        prepared = prepare_corpus([make_sentence(["a", "b"], [0, 1])],
                                  model.vocab, None, "seq")
        stats = train_epoch(model, prepared, TrainConfig(), lr=0.05, epoch=1)
        assert stats.token_count == 3

    def test_shared_root_update_rates(self):
        # the root of a two-leaf tree appears in both unrolls and must be
        # updated twice at half rate; the leaves once at full rate
        model = make_model(words=("a", "b", "c"))
        sents = [make_sentence(["a", "b", "c"], [0, 1, 1])]
        prepared = prepare_corpus(sents, model.vocab, None, "dep")
        ledger = []
        train_epoch(model, prepared, TrainConfig(mode="dep"), lr=0.2, epoch=1, ledger=ledger)
        by_node = {}
        for rec in ledger:
            by_node.setdefault(rec.node, []).append(rec.rate)
        assert by_node[0] == [0.1, 0.1]
        assert by_node[1] == [0.2]
        assert by_node[2] == [0.2]
        a = model.vocab.lookup("a")
        assert [r.input_id for r in ledger] == [model.vocab.root_id, a,
                                                model.vocab.root_id, a]

    def test_chain_updates_match_sequential_minus_end(self):
        # training a left-to-right chain in dependency mode replays exactly
        # the sequential updates, apart from the END event
        words = ["a", "c", "b"]
        sent = make_sentence(words, [0, 1, 2])
        dep_model = make_model(words=("a", "b", "c"), seed=31)
        seq_model = make_model(words=("a", "b", "c"), seed=31)

        dep_ledger, seq_ledger = [], []
        dep_prep = prepare_corpus([sent], dep_model.vocab, None, "dep")
        seq_prep = prepare_corpus([sent], seq_model.vocab, None, "seq")
        train_epoch(dep_model, dep_prep, TrainConfig(mode="dep"), 0.1, 1, dep_ledger)
        train_epoch(seq_model, seq_prep, TrainConfig(), 0.1, 1, seq_ledger)

        assert len(seq_ledger) == len(dep_ledger) + 1
        for d, s in zip(dep_ledger, seq_ledger):
            assert (d.node, d.input_id, d.target_id, d.rate) == \
                   (s.node, s.input_id, s.target_id, s.rate)
        assert seq_ledger[-1].target_id == seq_model.vocab.end_id

    def test_visit_order_seeded(self):
        model = make_model(words=("a",))
        sents = [make_sentence(["a"], [0]) for _ in range(8)]
        prepared = prepare_corpus(sents, model.vocab, None, "seq")

        def order(shuffle_seed, epoch):
            ledger = []
            cfg = TrainConfig(shuffle_seed=shuffle_seed)
            train_epoch(model, prepared, cfg, lr=0.0, epoch=epoch, ledger=ledger)
            seen = []
            for rec in ledger:
                if rec.sentence not in seen:
                    seen.append(rec.sentence)
            return seen

        assert order(1, 1) == order(1, 1)
        assert order(1, 1) != order(2, 1)
        assert order(1, 1) != order(1, 2)
        assert sorted(order(3, 5)) == list(range(8))


class TestAnneal:
    def test_no_decrease_keeps_rate(self):
        state = TrainState(current_lr=0.1)
        for metric in (0.40, 0.41, 0.41, 0.55):
            anneal(state, metric, 0.66)
        assert state.current_lr == 0.1
        assert not state.annealing

    def test_decrease_latches_permanently(self):
        state = TrainState(current_lr=0.1)
        expected = 0.1
        anneal(state, 0.40, 0.66)
        assert state.current_lr == expected
        anneal(state, 0.41, 0.66)
        assert state.current_lr == expected
        anneal(state, 0.40, 0.66)          # drop: latch and decay now
        expected *= 0.66
        assert state.current_lr == expected
        anneal(state, 0.42, 0.66)          # recovered, but stays latched
        expected *= 0.66
        assert state.current_lr == expected
        assert state.annealing

    def test_first_epoch_never_latches(self):
        state = TrainState(current_lr=0.5)
        anneal(state, 0.0, 0.5)
        assert state.current_lr == 0.5 and not state.annealing


class TestTrainLoop:
    def test_zero_epochs_returns_init(self):
        model = make_model(words=("a", "b"))
        init = snapshot(model)
        cfg = TrainConfig(max_epochs=0)
        result = train(model, [make_sentence(["a"], [0])], [], cfg)
        assert result.state.history == []
        assert params_equal(result.model, init)
        assert params_equal(model, init)

    def test_stops_below_min_lr(self):
        model = make_model(words=("a",))
        cfg = TrainConfig(lr=1e-5, min_lr=1e-4, max_epochs=5)
        result = train(model, [make_sentence(["a"], [0])], [], cfg)
        assert result.state.history == []

    def test_keeps_first_best_on_ties(self):
        # with an empty dev set the accuracy is 0.0 every epoch, so the
        # strict-improvement rule keeps the epoch-1 parameters
        sents = [make_sentence(["a", "b"], [0, 1])]
        model = make_model(words=("a", "b"), seed=77)
        twin = make_model(words=("a", "b"), seed=77)
        cfg = TrainConfig(max_epochs=2, lr=0.1)

        prepared = prepare_corpus(sents, twin.vocab, None, "seq")
        train_epoch(twin, prepared, cfg, lr=0.1, epoch=1)
        after_first = snapshot(twin)

        result = train(model, sents, [], cfg)
        assert len(result.state.history) == 2
        assert params_equal(result.model, after_first)
        assert not params_equal(model, after_first)   # live model kept epoch 2

    def test_history_records_rates_and_dev(self):
        model = make_model(words=("a", "b"))
        sents = [make_sentence(["a", "b"], [0, 1])]
        cfg = TrainConfig(max_epochs=3, lr=0.2, decay=0.5)
        result = train(model, sents, [], cfg)
        hist = result.state.history
        assert [h.epoch for h in hist] == [1, 2, 3]
        assert all(h.dev_accuracy == 0.0 for h in hist)
        assert hist[0].lr == 0.2
        # accuracy 0.0 repeats, never strictly drops, so no annealing
        assert hist[1].lr == 0.2 and hist[2].lr == 0.2

    def test_deterministic_given_seeds(self):
        sents = [make_sentence(["a", "b", "c"], [0, 1, 1]),
                 make_sentence(["b", "c"], [0, 1])]
        cfg = TrainConfig(max_epochs=3, lr=0.1, mode="dep")
        a = make_model(words=("a", "b", "c"), seed=5)
        b = make_model(words=("a", "b", "c"), seed=5)
        ra = train(a, sents, [], cfg)
        rb = train(b, sents, [], cfg)
        assert params_equal(ra.model, snapshot(rb.model))
        assert [(h.epoch, h.lr, h.train_entropy) for h in ra.state.history] == \
               [(h.epoch, h.lr, h.train_entropy) for h in rb.state.history]

    def test_epoch_entropy_decreases_on_small_corpus(self):
        model = make_model(words=("a", "b", "c", "d"), hidden=8)
        sents = [make_sentence(["a", "b", "c", "d"], [0, 1, 2, 3]),
                 make_sentence(["d", "c"], [0, 1])]
        cfg = TrainConfig(max_epochs=8, lr=0.3, mode="dep")
        result = train(model, sents, [], cfg)
        hist = result.state.history
        assert hist[-1].train_entropy < hist[0].train_entropy


class TestFormatHistory:
    def test_lines_and_nan(self):
        from deprnn.training import EpochStats

        hist = [EpochStats(1, 0.1, 2.5, 10, 0.25),
                EpochStats(2, 0.066, 2.25, 10, None)]
        text = format_history(hist)
        assert text == "1\t0.1\t2.500000\t0.250000\n2\t0.066\t2.250000\tnan\n"

    def test_empty(self):
        assert format_history([]) == ""
