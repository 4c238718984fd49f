import unittest

import numpy as np
from numpy.testing import assert_allclose

from unida.classifier import (ESLBranch, ProbabilityBatch,
                              bundles_from_logits)
from unida.losses import (ce_grad, entropy, esl_grad, hardest_negatives,
                          loss_ce, loss_esl, loss_sfc, loss_sova, loss_tova,
                          sova_grad, tova_grad)
from unida.classifier.composite import esl_branches


def _numeric_grad(func, x, h=1e-6):
    grad = np.zeros_like(x)
    for idx in np.ndindex(*x.shape):
        step = np.zeros_like(x)
        step[idx] = h
        grad[idx] = (func(x + step) - func(x - step)) / (2 * h)
    return grad


class TestCrossEntropy(unittest.TestCase):

    def test_one_hot_correct(self):
        p = np.array([[1.0, 0.0], [0.0, 1.0]])
        self.assertEqual(loss_ce(p, [0, 1]), 0.0)

    def test_uniform(self):
        self.assertAlmostEqual(loss_ce(np.full((3, 4), 0.25), [0, 1, 3]),
                               np.log(4), places=4)

    def test_matches_loop_oracle(self):
        rng = np.random.default_rng(0)
        batch = bundles_from_logits(rng.standard_normal((6, 8)))
        labels = rng.integers(0, 4, size=6)
        expected = np.mean(
            [-np.log(batch.p_mc[i, labels[i]]) for i in range(6)])
        self.assertAlmostEqual(loss_ce(batch.p_mc, labels), expected,
                               places=12)

    def test_label_out_of_range(self):
        with self.assertRaises(ValueError):
            loss_ce(np.full((1, 3), 1 / 3), [3])

    def test_gradient(self):
        rng = np.random.default_rng(1)
        logits = rng.standard_normal((4, 6))
        labels = np.array([0, 2, 1, 2])
        numeric = _numeric_grad(
            lambda z: loss_ce(bundles_from_logits(z).p_mc, labels), logits)
        assert_allclose(ce_grad(logits, labels), numeric, atol=1e-8)


class TestSourceOVA(unittest.TestCase):

    def test_worked_example(self):
        p_pos = np.array([[0.2, 0.9, 0.4]])
        self.assertAlmostEqual(loss_sova(p_pos, [1]), -0.81093, places=5)

    def test_symmetric_cancellation(self):
        self.assertAlmostEqual(loss_sova(np.array([[0.5, 0.5]]), [0]), 0.0)

    def test_confident_limit(self):
        eps = 1e-6
        p_pos = np.array([[1 - eps, eps, eps]])
        self.assertAlmostEqual(loss_sova(p_pos, [0]),
                               -np.log(1 - eps) + np.log(eps))

    def test_hardest_negative_ties_lowest(self):
        p_pos = np.array([[0.3, 0.9, 0.3], [0.8, 0.1, 0.8]])
        assert_allclose(hardest_negatives(p_pos, [1, 1]), [0, 0])

    def test_needs_two_classes(self):
        with self.assertRaises(ValueError):
            hardest_negatives(np.array([[0.5]]), [0])

    def test_gradient_with_frozen_negatives(self):
        rng = np.random.default_rng(2)
        logits = rng.standard_normal((5, 8)) * 2
        labels = rng.integers(0, 4, size=5)
        negatives = hardest_negatives(bundles_from_logits(logits).p_pos,
                                      labels)
        numeric = _numeric_grad(
            lambda z: loss_sova(
                bundles_from_logits(z).p_pos, labels, negatives), logits)
        assert_allclose(sova_grad(logits, labels, negatives), numeric,
                        atol=1e-8)


class TestEntropyStrengthened(unittest.TestCase):

    def _batch(self, p_mc, p_pos):
        p_mc, p_pos = np.atleast_2d(p_mc), np.atleast_2d(p_pos)
        return ProbabilityBatch(p_mc, p_pos, 1.0 - p_pos)

    def test_band_gives_zero(self):
        batch = self._batch([[0.5, 0.3, 0.2]], [[0.6, 0.5, 0.5]])
        self.assertEqual(loss_esl(batch, 0.4), 0.0)

    def test_sharpen_uniform(self):
        batch = self._batch([[1 / 3, 1 / 3, 1 / 3]], [[0.9, 0.5, 0.5]])
        self.assertAlmostEqual(loss_esl(batch, 0.4), np.log(3), places=4)

    def test_flatten_one_hot(self):
        batch = self._batch([[1.0, 0.0, 0.0]], [[0.1, 0.5, 0.5]])
        self.assertEqual(loss_esl(batch, 0.4), 0.0)

    def test_flatten_sign(self):
        batch = self._batch([[0.5, 0.5]], [[0.05, 0.5]])
        self.assertAlmostEqual(loss_esl(batch, 0.4), -np.log(2))

    def test_zero_gradient_in_band(self):
        logits = np.array([[1.0, 0.0, 0.9, 0.0]])
        batch = bundles_from_logits(logits)
        self.assertEqual(esl_branches(batch, 0.4)[0], 0)
        assert_allclose(esl_grad(logits, 0.4), 0.0)

    def test_gradient_with_frozen_branches(self):
        rng = np.random.default_rng(3)
        logits = rng.standard_normal((6, 10)) * 3
        branches = esl_branches(bundles_from_logits(logits), 0.2)
        numeric = _numeric_grad(
            lambda z: loss_esl(bundles_from_logits(z), 0.2, branches),
            logits)
        assert_allclose(esl_grad(logits, 0.2, branches), numeric, atol=1e-8)

    def _mc_entropy_after_step(self, logits):
        before = entropy(bundles_from_logits(logits).p_mc, axis=1)[0]
        stepped = logits - 0.1 * esl_grad(logits, 0.4)
        after = entropy(bundles_from_logits(stepped).p_mc, axis=1)[0]
        return before, after

    def test_sharpen_step_lowers_entropy(self):
        # Pair 0 gap is 3: p+ = 0.95 clears p- + 0.4.
        logits = np.array([[1.0, 0.5, 0.2, -2.0, 0.0, 0.0]])
        self.assertEqual(esl_branches(bundles_from_logits(logits), 0.4)[0],
                         ESLBranch.SHARPEN)
        before, after = self._mc_entropy_after_step(logits)
        self.assertLess(after, before)

    def test_flatten_step_raises_entropy(self):
        logits = np.array([[1.0, 0.5, 0.2, 4.0, 0.0, 0.0]])
        self.assertEqual(esl_branches(bundles_from_logits(logits), 0.4)[0],
                         ESLBranch.FLATTEN)
        before, after = self._mc_entropy_after_step(logits)
        self.assertGreater(after, before)


class TestFeatureClustering(unittest.TestCase):

    def test_concentrated_row(self):
        row = np.zeros((1, 10))
        row[0, 3] = 1.0
        self.assertEqual(loss_sfc(row), 0.0)

    def test_uniform_over_neighbors(self):
        row = np.full((1, 10), 1 / 9)
        row[0, 0] = 0.0
        self.assertAlmostEqual(loss_sfc(row), np.log(9), places=4)

    def test_matches_entropy_oracle(self):
        rng = np.random.default_rng(4)
        rows = rng.random((3, 7))
        rows /= rows.sum(axis=1, keepdims=True)
        expected = np.mean([-np.sum(r * np.log(r)) for r in rows])
        self.assertAlmostEqual(loss_sfc(rows), expected, places=10)

    def test_rows_must_sum_to_one(self):
        with self.assertRaises(ValueError):
            loss_sfc(np.array([[0.5, 0.4]]))


class TestTargetOVAEntropy(unittest.TestCase):

    def test_deterministic_pairs(self):
        p_pos = np.array([[1.0, 0.0, 1.0]])
        self.assertEqual(loss_tova(p_pos, 1.0 - p_pos), 0.0)

    def test_uniform_pairs(self):
        p = np.full((2, 5), 0.5)
        self.assertAlmostEqual(loss_tova(p, p), 5 * np.log(2), places=4)

    def test_matches_binary_entropy_oracle(self):
        rng = np.random.default_rng(5)
        p_pos = rng.random((4, 3))
        p_neg = 1 - p_pos
        expected = np.mean(
            np.sum(-p_pos * np.log(p_pos) - p_neg * np.log(p_neg), axis=1))
        self.assertAlmostEqual(loss_tova(p_pos, p_neg), expected, places=10)

    def test_gradient(self):
        rng = np.random.default_rng(6)
        logits = rng.standard_normal((3, 8)) * 2
        numeric = _numeric_grad(
            lambda z: loss_tova(
                bundles_from_logits(z).p_pos,
                bundles_from_logits(z).p_neg), logits)
        assert_allclose(tova_grad(logits), numeric, atol=1e-8)


if __name__ == '__main__':
    unittest.main()
