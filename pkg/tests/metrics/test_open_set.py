import json
import math
import tempfile
import unittest
from pathlib import Path

import numpy as np

from unida.classifier import DecisionBatch
from unida.metrics import (METRIC_FIELDS, MetricsReport, auroc, evaluate,
                           format_report, hos, read_metrics, write_metrics)
from unida.utils.exceptions import MetricError


def _decisions(predicted, k, scores=None):
    predicted = np.asarray(predicted)
    if scores is None:
        scores = (predicted == k).astype(float)
    return DecisionBatch(predicted, np.minimum(predicted, k - 1),
                         np.asarray(scores, dtype=float), k)


class TestHOS(unittest.TestCase):

    def test_reported_rows(self):
        self.assertAlmostEqual(hos(76.7, 72.9), 74.8, delta=0.05)
        self.assertAlmostEqual(hos(93.3, 75.2), 83.3, delta=0.05)

    def test_equal_inputs(self):
        self.assertAlmostEqual(hos(50, 50), 50)

    def test_zero_annihilates(self):
        self.assertEqual(hos(100, 0), 0.0)
        self.assertEqual(hos(0, 0), 0.0)

    def test_between_min_and_mean(self):
        rng = np.random.default_rng(0)
        for a, b in rng.uniform(0.1, 100, size=(100, 2)):
            h = hos(a, b)
            self.assertLessEqual(min(a, b) - 1e-9, h)
            self.assertLessEqual(h, (a + b) / 2 + 1e-9)


class TestAUROC(unittest.TestCase):

    def test_separated(self):
        self.assertEqual(auroc([0.9, 0.8, 0.1, 0.2], [1, 1, 0, 0]), 1.0)

    def test_all_ties(self):
        self.assertEqual(auroc([0.5] * 4, [1, 0, 1, 0]), 0.5)

    def test_pairwise_example(self):
        self.assertAlmostEqual(auroc([0.9, 0.8, 0.7, 0.85], [1, 1, 0, 0]),
                               0.75)

    def test_monotone_transform_invariance(self):
        rng = np.random.default_rng(0)
        scores = rng.uniform(size=40)
        is_unknown = rng.uniform(size=40) < 0.4
        base = auroc(scores, is_unknown)
        for transform in (np.exp, lambda s: 3.0 * s - 7.0,
                          lambda s: np.log(s / (1.0 - s))):
            self.assertAlmostEqual(auroc(transform(scores), is_unknown), base,
                                   places=12)

    def test_single_class(self):
        with self.assertRaises(MetricError):
            auroc([0.1, 0.2], [0, 0])


class TestEvaluate(unittest.TestCase):

    def test_perfect(self):
        labels = np.array([0, 1, 2, 2])
        report = evaluate(_decisions([0, 1, 2, 2], 2), labels, [0, 1])
        self.assertEqual((report.acc_kn, report.acc_unk, report.hos),
                         (100.0, 100.0, 100.0))
        self.assertEqual(report.auc, 1.0)

    def test_all_unknown(self):
        labels = np.array([0, 1, 2, 2])
        report = evaluate(_decisions([2, 2, 2, 2], 2), labels, [0, 1])
        self.assertEqual((report.acc_kn, report.acc_unk, report.hos),
                         (0.0, 100.0, 0.0))

    def test_hand_counted_toy_set(self):
        labels = np.array([0] * 4 + [1] * 4 + [2] * 4)
        predicted = [0, 0, 0, 0, 1, 1, 0, 0, 2, 2, 2, 0]
        report = evaluate(_decisions(predicted, 2), labels, [0, 1])
        self.assertAlmostEqual(report.acc_kn, 75.0)
        self.assertAlmostEqual(report.acc_unk, 75.0)
        self.assertAlmostEqual(report.hos, 75.0)
        self.assertAlmostEqual(report.acc, 75.0)

    def test_duplicated_class_keeps_acc_kn(self):
        labels = np.array([0] * 4 + [1] * 4 + [2] * 4)
        predicted = np.array([0, 0, 0, 0, 1, 1, 0, 0, 2, 2, 2, 0])
        report = evaluate(_decisions(predicted, 2), labels, [0, 1])
        # Class 1 appears three times as often, with the same outcomes.
        rows = np.concatenate([np.arange(12), np.arange(4, 8),
                               np.arange(4, 8)])
        tripled = evaluate(_decisions(predicted[rows], 2), labels[rows],
                           [0, 1])
        self.assertAlmostEqual(tripled.acc_kn, report.acc_kn)
        self.assertAlmostEqual(tripled.acc_unk, report.acc_unk)
        self.assertNotAlmostEqual(tripled.acc, report.acc)

    def test_source_private_label_is_known(self):
        # K = 3 with class 2 source-private: it is neither shared nor unknown.
        labels = np.array([0, 1, 2, 3])
        report = evaluate(_decisions([0, 1, 3, 3], 3), labels, [0, 1])
        self.assertEqual(report.acc_kn, 100.0)
        self.assertEqual(report.acc_unk, 100.0)

    def test_no_unknowns_gives_nan(self):
        labels = np.array([0, 1])
        report = evaluate(_decisions([0, 1], 2), labels, [0, 1])
        self.assertEqual(report.acc_kn, 100.0)
        self.assertTrue(math.isnan(report.acc_unk))
        self.assertTrue(math.isnan(report.hos))
        self.assertTrue(math.isnan(report.auc))

    def test_length_mismatch(self):
        with self.assertRaises(MetricError):
            evaluate(_decisions([0, 1], 2), np.array([0]), [0])

    def test_format_report(self):
        text = format_report(MetricsReport(75.0, 72.94, 74.0, 80.0, 0.9))
        self.assertIn('HOS 74.0', text)
        self.assertIn('Acc_unk 72.9', text)


class TestRecords(unittest.TestCase):

    def test_write_and_read(self):
        history = [MetricsReport(10.0, 20.0, 13.3, 11.0, 0.6),
                   MetricsReport(30.0, 40.0, 34.3, 31.0, 0.7)]
        with tempfile.TemporaryDirectory() as tmp:
            paths = write_metrics(history, tmp)
            with open(paths['csv']) as f:
                self.assertEqual(f.readline().strip(),
                                 ','.join(('epoch', ) + METRIC_FIELDS))
            with open(paths['jsonl']) as f:
                first = json.loads(f.readline())
            self.assertEqual(first['epoch'], 1)
            self.assertEqual(read_metrics(Path(tmp) / 'metrics.jsonl'),
                             history)


if __name__ == '__main__':
    unittest.main()
