import random

import pytest

from drnet.bitcore import BitMatrix, BitVector
from drnet.data import Schema, dataset_from_rows
from drnet.datagen import generate_inputs
from drnet.errors import ValidationError
from drnet.network import NetworkConfig, RuleNetwork, count_weights, initialize
from drnet.training import (
    GreedyTrainer,
    TrainParams,
    accuracy,
    enumerate_flips,
    fit,
    optimize_coefs,
    _dataset_columns,
)


def make_net(hidden, n_vars=4, lbar=2.0, p=0.2, seed=0):
    schema = Schema.bool_vars([f"v{i}" for i in range(n_vars)])
    cfg = NetworkConfig(hidden_sizes=hidden, avg_rule_length=min(lbar, n_vars),
                        init_probability=p, seed=seed)
    return initialize(cfg, schema)


class TestAccuracy:
    def test_identical(self):
        v = BitVector.from_ints([1, 0, 1])
        assert accuracy(v, v) == 1.0

    def test_complementary(self):
        a = BitVector.from_ints([1, 0, 1, 0])
        b = BitVector.from_ints([0, 1, 0, 1])
        assert accuracy(a, b) == 0.0

    def test_three_of_four(self):
        a = BitVector.from_ints([1, 1, 0, 0])
        b = BitVector.from_ints([1, 1, 0, 1])
        assert accuracy(a, b) == 0.75

    def test_length_mismatch(self):
        with pytest.raises(ValidationError):
            accuracy(BitVector(3), BitVector(4))


class TestEnumerateFlips:
    def test_count_equals_weight_count(self):
        net = make_net((6, 4, 2), n_vars=5)
        flips = enumerate_flips(net)
        assert len(flips) == count_weights(net.config, net.input_size)

    def test_companion_on_contradicting_literal(self):
        schema = Schema.bool_vars(["x"])
        w0 = BitMatrix.from_bits([[1], [0]])  # node selects literal x
        w1 = BitMatrix.from_bits([[1]])
        net = RuleNetwork(schema, (1,), [w0, w1])
        flips = enumerate_flips(net)
        turn_on_neg = next(f for f in flips if f.layer == 0 and f.source == 1)
        assert turn_on_neg.companions == (0,)
        turn_off_pos = next(f for f in flips if f.layer == 0 and f.source == 0)
        assert turn_off_pos.companions == ()

    def test_applied_first_layer_flip_keeps_one_hot_constraint(self, rng):
        for seed in range(20):
            net = make_net((5, 3, 2), n_vars=4, seed=seed)
            trainer = GreedyTrainer(net)
            flips = [f for f in trainer.enumerate_flips() if f.layer == 0]
            flip = flips[rng.randrange(len(flips))]
            trainer.apply_flip(flip)
            out = trainer.to_network()
            w0 = out.weights[0]
            for k in range(w0.cols):
                for attr in range(out.schema.n_attributes):
                    cols = list(out.schema.attr_columns(attr))
                    assert sum(w0.get(c, k) for c in cols) <= 1

    def test_apply_revert_involution(self, rng):
        net = make_net((5, 3, 2), n_vars=4, seed=9)
        trainer = GreedyTrainer(net)
        before = trainer.snapshot()
        for flip in trainer.enumerate_flips():
            trainer.apply_flip(flip)
            trainer.revert_flip(flip)
        assert trainer.snapshot() == before


class TestOptimizeCoefs:
    def test_single_positive_example_gets_covered(self):
        # one uncovered positive example over a one-attribute schema; the
        # exhaustive flip space is tiny, so greedy must reach accuracy 1
        schema = Schema.bool_vars(["x"])
        w0 = BitMatrix.from_bits([[0], [1]])  # rule: not x
        w1 = BitMatrix.from_bits([[1]])
        net = RuleNetwork(schema, (1,), [w0, w1])
        x = dataset_from_rows(schema, [[0]], None).x  # x true
        y = BitVector.from_ints([1])
        assert net.predict(x).get(0) == 0
        out = optimize_coefs(net, x, y)
        assert out.predict(x).get(0) == 1

    def test_max_flips_zero_is_identity(self):
        net = make_net((4, 2, 2), n_vars=4, seed=2)
        inputs = generate_inputs(4, [f"v{i}" for i in range(4)])
        y = BitVector.from_ints([i % 2 for i in range(16)])
        out = optimize_coefs(net, inputs.x, y, max_flips=0)
        assert out.weights == net.weights

    def test_perfect_fit_returns_immediately(self):
        net = make_net((4, 2, 2), n_vars=4, seed=2)
        inputs = generate_inputs(4, [f"v{i}" for i in range(4)])
        y = net.predict(inputs.x)
        trainer = GreedyTrainer(net)
        history = trainer.optimize_batch(
            _dataset_columns(inputs.x), y.bits, inputs.n_rows, None)
        assert history == []

    def test_batch_accuracy_strictly_increases(self):
        rng = random.Random(1)
        for trial in range(30):
            net = make_net((5, 3, 2), n_vars=5, p=0.15, seed=trial)
            inputs = generate_inputs(5, [f"v{i}" for i in range(5)])
            idx = rng.sample(range(32), 16)
            batch = inputs.subset(idx)
            y = rng.getrandbits(16)
            trainer = GreedyTrainer(net)
            history = trainer.optimize_batch(
                _dataset_columns(batch.x), y, 16, None)
            matches = [m for _, m in history]
            assert matches == sorted(set(matches))


class TestTrialConsistency:
    def test_incremental_scoring_equals_full_recomputation(self):
        rng = random.Random(7)
        for trial in range(25):
            net = make_net((6, 4, 2), n_vars=5, p=0.2, seed=100 + trial)
            inputs = generate_inputs(5, [f"v{i}" for i in range(5)])
            cols = _dataset_columns(inputs.x)
            n = inputs.n_rows
            y = rng.getrandbits(n)
            rowmask = (1 << n) - 1
            trainer = GreedyTrainer(net)
            acts = trainer.forward(cols, n)
            not_acts = [[a ^ rowmask for a in layer] for layer in acts]
            base = (~(trainer.output_bits(acts, n) ^ y) & rowmask).bit_count()
            for flip in trainer.enumerate_flips():
                fast = trainer._trial_matches(flip, acts, not_acts, y, rowmask)
                trainer.apply_flip(flip)
                slow = trainer.matches_on(cols, y, n)
                trainer.revert_flip(flip)
                assert slow == (base if fast is None else fast)


class TestFit:
    def _one_rule_dataset(self):
        # concept: v0 and not v1, over all 8 assignments of 3 variables
        inputs = generate_inputs(3, ["v0", "v1", "v2"])
        labels = []
        for r in range(8):
            labels.append(int((r & 1) and not (r >> 1 & 1)))
        return dataset_from_rows(
            inputs.schema,
            [inputs.schema.decode_row(inputs.x.row_word(r)) for r in range(8)],
            labels,
        )

    def test_reaches_perfect_accuracy_on_one_rule_concept(self):
        # small batches supply the noise needed to assemble the two-literal
        # rule; seeds 0..2 all get there within five epochs
        ds = self._one_rule_dataset()
        for seed in range(3):
            cfg = NetworkConfig(hidden_sizes=(4,), avg_rule_length=3.0, seed=seed)
            net = initialize(cfg, ds.schema)
            out = fit(net, ds.x, ds.y,
                      TrainParams(n_epochs=5, batch_size=3, seed=seed + 50))
            assert accuracy(ds.y, out.predict(ds.x)) == 1.0

    def test_already_perfect_net_unchanged(self):
        net = make_net((4, 2, 2), n_vars=4, seed=11)
        inputs = generate_inputs(4, [f"v{i}" for i in range(4)])
        y = net.predict(inputs.x)
        out = fit(net, inputs.x, y, TrainParams(n_epochs=2, batch_size=8, seed=0))
        assert out.weights == net.weights

    def test_empty_training_set_rejected(self):
        net = make_net((4,), n_vars=4)
        with pytest.raises(ValidationError):
            fit(net, BitMatrix.zeros(0, net.input_size), BitVector(0), TrainParams())

    def test_training_accuracy_never_below_initial(self):
        rng = random.Random(3)
        for trial in range(20):
            net = make_net((5, 3, 2), n_vars=5, p=0.15, seed=trial)
            inputs = generate_inputs(5, [f"v{i}" for i in range(5)])
            y = BitVector(32, rng.getrandbits(32))
            initial = accuracy(y, net.predict(inputs.x))
            out = fit(net, inputs.x, y,
                      TrainParams(n_epochs=2, batch_size=10, seed=trial))
            assert accuracy(y, out.predict(inputs.x)) >= initial

    def test_deterministic_for_fixed_seed(self):
        ds = self._one_rule_dataset()
        cfg = NetworkConfig(hidden_sizes=(4, 2, 2), avg_rule_length=2.0, seed=7)
        params = TrainParams(n_epochs=3, batch_size=4, seed=13)
        outs = []
        for _ in range(2):
            net = initialize(cfg, ds.schema)
            outs.append(fit(net, ds.x, ds.y, params))
        assert outs[0] == outs[1]

    def test_trace_one_record_per_batch(self):
        ds = self._one_rule_dataset()
        cfg = NetworkConfig(hidden_sizes=(4,), avg_rule_length=1.0, seed=5)
        net = initialize(cfg, ds.schema)
        trace = []
        fit(net, ds.x, ds.y, TrainParams(n_epochs=3, batch_size=3, seed=2),
            trace=trace)
        # 8 rows, batch 3 -> ceil = 3 batches per epoch, remainder kept
        assert len(trace) == 3 * 3
        assert [(r.epoch, r.batch) for r in trace] == [
            (e, b) for e in range(3) for b in range(3)
        ]

    def test_trainer_forward_agrees_with_predict(self):
        rng = random.Random(5)
        for trial in range(20):
            net = make_net((6, 4, 2), n_vars=5, p=0.2, seed=trial)
            inputs = generate_inputs(5, [f"v{i}" for i in range(5)])
            y = rng.getrandbits(32)
            trainer = GreedyTrainer(net)
            m = trainer.matches_on(_dataset_columns(inputs.x), y, 32)
            assert m == round(accuracy(BitVector(32, y), net.predict(inputs.x)) * 32)
