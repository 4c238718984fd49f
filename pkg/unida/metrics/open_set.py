import logging
from dataclasses import asdict, dataclass
from typing import Dict, Iterable

import numpy as np
from sklearn.metrics import roc_auc_score

from unida.classifier.composite import DecisionBatch
from unida.utils.exceptions import MetricError

logger = logging.getLogger(__name__)

METRIC_FIELDS = ('acc_kn', 'acc_unk', 'hos', 'acc', 'auc')


@dataclass(frozen=True)
class MetricsReport:
    """Open-set scores of one evaluation.

    Attributes:
        acc_kn (float): Mean per-class accuracy over shared classes (%).
        acc_unk (float): Share of target-private samples rejected (%).
        hos (float): Harmonic mean of acc_kn and acc_unk (%).
        acc (float): Instance accuracy on shared-class samples (%).
        auc (float): AUROC of the paradox score for unknown detection.
    """
    acc_kn: float
    acc_unk: float
    hos: float
    acc: float
    auc: float

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


def hos(acc_kn: float, acc_unk: float) -> float:
    """2 * acc_kn * acc_unk / (acc_kn + acc_unk); 0 when either is 0."""
    if acc_kn <= 0 or acc_unk <= 0:
        return 0.0
    return 2.0 * acc_kn * acc_unk / (acc_kn + acc_unk)


def auroc(scores: np.ndarray, is_unknown: np.ndarray) -> float:
    """Probability that an unknown sample outscores a known one, ties 1/2.

    Raises:
        MetricError: If only one of the two groups is present.
    """
    scores = np.asarray(scores, dtype=float).ravel()
    is_unknown = np.asarray(is_unknown, dtype=bool).ravel()
    if scores.shape != is_unknown.shape:
        raise MetricError(f'{scores.size} scores for {is_unknown.size} '
                          'labels.')
    if is_unknown.all() or not is_unknown.any():
        raise MetricError('AUROC needs both known and unknown samples.')
    return float(roc_auc_score(is_unknown, scores))


def evaluate(decisions: DecisionBatch, ground_truth: np.ndarray,
             shared_classes: Iterable[int]) -> MetricsReport:
    """Score target decisions against the ground truth.

    A shared-class sample counts as correct only when its predicted class
    equals its label; rejecting it as UNKNOWN is an error. Samples whose
    label is neither shared nor a source class (index >= K) are unknowns.

    Args:
        decisions (DecisionBatch): Decisions aligned with ``ground_truth``.
        ground_truth (np.ndarray): Global class ids of the target samples.
        shared_classes (Iterable[int]): Class ids shared by both domains.

    Returns:
        MetricsReport: Percentages for the accuracies and HOS, a fraction
            for the AUC. Scores that need unknown samples are NaN when the
            target has none.
    """
    labels = np.asarray(ground_truth, dtype=int).ravel()
    if labels.size != len(decisions):
        raise MetricError(f'{len(decisions)} decisions for {labels.size} '
                          'labels.')
    predicted = decisions.predicted_class
    shared = sorted(set(int(c) for c in shared_classes))
    is_unknown = labels >= decisions.num_classes

    per_class = []
    for c in shared:
        mask = labels == c
        if not mask.any():
            logger.warning('Shared class %d has no target samples; it is '
                           'left out of acc_kn.', c)
            continue
        per_class.append(np.mean(predicted[mask] == c))
    acc_kn = 100.0 * float(np.mean(per_class)) if per_class else 0.0

    known_mask = np.isin(labels, shared)
    acc = 100.0 * float(np.mean(predicted[known_mask] == labels[known_mask])) \
        if known_mask.any() else 0.0

    if is_unknown.any():
        acc_unk = 100.0 * float(
            np.mean(predicted[is_unknown] == decisions.num_classes))
        h = hos(acc_kn, acc_unk)
    else:
        logger.warning('Target has no target-private samples; acc_unk, hos '
                       'and auc are undefined.')
        acc_unk = h = float('nan')

    if is_unknown.any() and not is_unknown.all():
        auc = auroc(decisions.paradox_score, is_unknown)
    else:
        auc = float('nan')
    return MetricsReport(acc_kn=acc_kn, acc_unk=acc_unk, hos=h, acc=acc,
                         auc=auc)


def format_report(report: MetricsReport) -> str:
    """One-line summary with percentages to one decimal place."""
    return (f'HOS {report.hos:.1f} | Acc_kn {report.acc_kn:.1f} | '
            f'Acc_unk {report.acc_unk:.1f} | Acc {report.acc:.1f} | '
            f'AUC {report.auc:.3f}')
