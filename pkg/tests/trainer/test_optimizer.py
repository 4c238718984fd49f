import unittest

import numpy as np
from numpy.testing import assert_allclose, assert_array_equal

from unida.classifier import bundles_from_logits, esl_branches
from unida.losses import (FrozenSelections, LossWeights, compute_objective,
                          hardest_negatives)
from unida.memory import MemoryBank
from unida.nn import (GradientBundle, backward, classifier_logits, forward,
                      init_params)
from unida.trainer import (BatchSampler, OptimizerState, lr_at,
                           sgd_momentum_update, step)


def _objective(params, head, batch, labels, indices, bank, weights,
               selections=None):
    """Overall objective of one mixed batch and its parameter gradients."""
    n = labels.size
    features, cache = forward(params, batch)
    logits = classifier_logits(head, features)
    if selections is None:
        selections = FrozenSelections(
            hardest_negatives(bundles_from_logits(logits[:n]).p_pos, labels),
            esl_branches(bundles_from_logits(logits[n:]), weights.margin))
    report, grads = compute_objective(logits[:n], labels, logits[n:],
                                      features[n:], indices, bank, weights,
                                      selections=selections)
    grad_logits = np.concatenate([grads.source_logits, grads.target_logits])
    grad_features = np.zeros_like(features)
    grad_features[n:] = grads.target_features
    return (report.total, backward(params, head, cache, grad_logits,
                                   grad_features), selections)


class TestSchedule(unittest.TestCase):

    def test_start_is_base(self):
        self.assertEqual(lr_at(0, 100, 0.01), 0.01)

    def test_end_value(self):
        self.assertAlmostEqual(lr_at(100, 100, 1.0), 11**-0.75)
        self.assertAlmostEqual(lr_at(100, 100, 1.0), 0.1659, places=4)

    def test_monotone(self):
        rates = [lr_at(t, 50, 0.01) for t in range(51)]
        self.assertTrue(all(a >= b for a, b in zip(rates, rates[1:])))

    def test_invalid(self):
        with self.assertRaises(ValueError):
            lr_at(0, 0, 0.01)
        with self.assertRaises(ValueError):
            lr_at(11, 10, 0.01)


class TestMomentumUpdate(unittest.TestCase):

    def test_plain_sgd(self):
        theta, v = np.array([1.0]), np.zeros(1)
        sgd_momentum_update(theta, np.array([0.5]), v, 0.1, 0.0, 0.0)
        assert_allclose(theta, [0.95])

    def test_momentum_decays(self):
        theta, v = np.array([0.0]), np.array([1.0])
        for i in range(1, 4):
            sgd_momentum_update(theta, np.zeros(1), v, 0.1, 0.9, 0.0)
            assert_allclose(v, [0.9**i])

    def test_hand_recursion(self):
        # f(theta) = theta^2 / 2, g = theta; mu = 0.5, lambda = 0.1, lr = 0.2
        theta, v = np.array([1.0]), np.zeros(1)
        t, vel = 1.0, 0.0
        for _ in range(3):
            grad = theta.copy()
            sgd_momentum_update(theta, grad, v, 0.2, 0.5, 0.1)
            vel = 0.5 * vel + (t + 0.1 * t)
            t = t - 0.2 * vel
            assert_allclose(theta, [t])
            assert_allclose(v, [vel])

    def test_shape_mismatch(self):
        with self.assertRaises(ValueError):
            sgd_momentum_update(np.zeros(2), np.zeros(3), np.zeros(2), 0.1,
                                0.9, 0.0)


class TestStep(unittest.TestCase):

    def test_groups_use_their_rates(self):
        params, head = init_params(3, 2, 2, depth=1,
                                   rng=np.random.default_rng(0))
        opt = OptimizerState.create(params, head, total_iterations=10,
                                    lr_head=0.1, lr_extractor=0.01,
                                    momentum=0.0, weight_decay=0.0)
        grads = GradientBundle.zeros_like(params, head)
        grads.head_bias = np.ones_like(head.bias)
        grads.extractor_biases[0] = np.ones_like(params.biases[0])
        head_b, ext_b = head.bias.copy(), params.biases[0].copy()
        step(params, head, grads, opt)
        assert_allclose(head.bias, head_b - 0.1)
        assert_allclose(params.biases[0], ext_b - 0.01)
        self.assertEqual(opt.t, 1)
        self.assertAlmostEqual(opt.current_lrs()[0], lr_at(1, 10, 0.1))

    def test_small_step_lowers_objective(self):
        rng = np.random.default_rng(5)
        params, head = init_params(4, 5, 3, depth=2, width=8, rng=rng)
        head.weight *= 3.0
        batch = rng.standard_normal((10, 4))
        labels = rng.integers(0, 3, size=6)
        indices = np.array([0, 2, 5, 7])
        rows = rng.standard_normal((8, 5))
        bank = MemoryBank(8, 5, tau=0.05)
        bank.initialize(rows / np.linalg.norm(rows, axis=1, keepdims=True))
        bank.update_batch(indices, forward(params, batch)[0][6:])
        weights = LossWeights(margin=0.1)

        before, grads, selections = _objective(params, head, batch, labels,
                                               indices, bank, weights)
        opt = OptimizerState.create(params, head, total_iterations=1,
                                    lr_head=1e-6, lr_extractor=1e-6,
                                    momentum=0.9, weight_decay=0.0)
        step(params, head, grads, opt)
        after, _, _ = _objective(params, head, batch, labels, indices, bank,
                                 weights, selections)
        self.assertLess(after, before)


class TestBatchSampler(unittest.TestCase):

    def test_epoch_covers_every_index(self):
        sampler = BatchSampler(10, 4, np.random.default_rng(0))
        sampler.start_epoch()
        seen = np.concatenate([next(sampler) for _ in range(3)])
        assert_array_equal(np.sort(seen), np.arange(10))

    def test_batches_are_distinct_and_capped(self):
        sampler = BatchSampler(3, 8, np.random.default_rng(1))
        sampler.start_epoch()
        for _ in range(5):
            batch = next(sampler)
            self.assertEqual(batch.size, 3)
            self.assertEqual(np.unique(batch).size, 3)

    def test_smaller_domain_cycles(self):
        sampler = BatchSampler(5, 2, np.random.default_rng(2))
        sampler.start_epoch()
        sizes = [next(sampler).size for _ in range(6)]
        self.assertEqual(sizes, [2, 2, 1, 2, 2, 1])


if __name__ == '__main__':
    unittest.main()
