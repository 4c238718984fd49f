"""The five UniDA loss terms and their analytic gradients.

Every ``loss_*`` function takes probabilities and returns a batch mean in
nats. The matching ``*_grad`` function returns the gradient of that mean
w.r.t. the (B, 2K) composite logits, or w.r.t. the target features for the
feature-clustering loss. Discrete choices (the hardest negative OVA predictor
and the entropy-strengthened branch) are treated as constants and can be
passed in frozen.
"""
from typing import Optional

import numpy as np
from scipy.special import entr, log_softmax, softmax

from unida.classifier.composite import (ProbabilityBatch, bundles_from_logits,
                                        esl_branches)
from unida.memory.memory_bank import MemoryBank

# Probabilities are clamped to [LOG_FLOOR, 1] before taking logs.
LOG_FLOOR = 1e-12
ROW_SUM_TOL = 1e-6


def _safe_log(p: np.ndarray) -> np.ndarray:
    return np.log(np.clip(p, LOG_FLOOR, 1.0))


def _check_labels(labels: np.ndarray, num_classes: int,
                  batch_size: int) -> np.ndarray:
    labels = np.asarray(labels, dtype=int).ravel()
    if labels.size != batch_size:
        raise ValueError(f'{labels.size} labels for a batch of {batch_size}.')
    if labels.size and (labels.min() < 0 or labels.max() >= num_classes):
        raise ValueError(f'Labels must lie in [0, {num_classes}).')
    return labels


def _pair_gap(logits: np.ndarray) -> np.ndarray:
    """u_k = logit_k - logit_{K+k}, so that p+_k = sigmoid(u_k)."""
    k = logits.shape[1] // 2
    return logits[:, :k] - logits[:, k:]


def _scatter_pair_grad(grad_gap: np.ndarray) -> np.ndarray:
    """Gradient w.r.t. the 2K logits from a gradient w.r.t. the gaps u."""
    return np.concatenate([grad_gap, -grad_gap], axis=1)


def entropy(p: np.ndarray, axis: int = -1) -> np.ndarray:
    """Shannon entropy in nats with 0 log 0 = 0."""
    return entr(p).sum(axis=axis)


# Source cross-entropy


def loss_ce(p_mc: np.ndarray, labels: np.ndarray) -> float:
    """Mean of -log p_mc[y] over the source batch."""
    p_mc = np.atleast_2d(p_mc)
    labels = _check_labels(labels, p_mc.shape[1], p_mc.shape[0])
    picked = p_mc[np.arange(labels.size), labels]
    return float(np.mean(-_safe_log(picked)))


def ce_grad(logits: np.ndarray, labels: np.ndarray) -> np.ndarray:
    b, k = logits.shape[0], logits.shape[1] // 2
    labels = _check_labels(labels, k, b)
    grad = np.zeros_like(logits)
    grad[:, :k] = softmax(logits[:, :k], axis=1)
    grad[np.arange(b), labels] -= 1.0
    return grad / b


# Source one-vs-all loss with the hardest negative


def hardest_negatives(p_pos: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Index j != y of the largest p+ per row (lowest index on ties)."""
    p_pos = np.atleast_2d(p_pos)
    if p_pos.shape[1] < 2:
        raise ValueError('The one-vs-all loss needs K >= 2 classes.')
    labels = _check_labels(labels, p_pos.shape[1], p_pos.shape[0])
    masked = p_pos.astype(float)
    masked[np.arange(labels.size), labels] = -np.inf
    return np.argmax(masked, axis=1)


def loss_sova(p_pos: np.ndarray,
              labels: np.ndarray,
              negatives: Optional[np.ndarray] = None) -> float:
    """Mean of -log p+_y + max_{j != y} log p+_j over the source batch."""
    p_pos = np.atleast_2d(p_pos)
    if negatives is None:
        negatives = hardest_negatives(p_pos, labels)
    labels = _check_labels(labels, p_pos.shape[1], p_pos.shape[0])
    rows = np.arange(labels.size)
    per_sample = -_safe_log(p_pos[rows, labels]) \
        + _safe_log(p_pos[rows, negatives])
    return float(np.mean(per_sample))


def sova_grad(logits: np.ndarray,
              labels: np.ndarray,
              negatives: Optional[np.ndarray] = None) -> np.ndarray:
    b = logits.shape[0]
    gap = _pair_gap(logits)
    if negatives is None:
        negatives = hardest_negatives(bundles_from_logits(logits).p_pos,
                                      labels)
    labels = _check_labels(labels, gap.shape[1], b)
    # d log sigmoid(u) / du = 1 - sigmoid(u) = p-
    p_neg = 1.0 - softmax(np.stack([gap, np.zeros_like(gap)], axis=2),
                          axis=2)[:, :, 0]
    rows = np.arange(b)
    grad_gap = np.zeros_like(gap)
    grad_gap[rows, labels] -= p_neg[rows, labels]
    grad_gap[rows, negatives] += p_neg[rows, negatives]
    return _scatter_pair_grad(grad_gap / b)


# Entropy-strengthened loss


def loss_esl(batch: ProbabilityBatch,
             m: float,
             branches: Optional[np.ndarray] = None) -> float:
    """Mean of branch * H(p_mc): +H when sharpening, -H when flattening,
    0 inside the margin band."""
    if branches is None:
        branches = esl_branches(batch, m)
    return float(np.mean(branches * entropy(batch.p_mc, axis=1)))


def esl_grad(logits: np.ndarray,
             m: float,
             branches: Optional[np.ndarray] = None) -> np.ndarray:
    b, k = logits.shape[0], logits.shape[1] // 2
    if branches is None:
        branches = esl_branches(bundles_from_logits(logits), m)
    log_p = log_softmax(logits[:, :k], axis=1)
    p = np.exp(log_p)
    h = -np.sum(p * log_p, axis=1, keepdims=True)
    # dH/dz_j = -p_j (log p_j + H)
    grad_h = -p * (log_p + h)
    grad = np.zeros_like(logits)
    grad[:, :k] = branches[:, None] * grad_h / b
    return grad


# Self-supervised feature clustering


def loss_sfc(similarities: np.ndarray) -> float:
    """Mean entropy of the neighbor distributions (self column is 0)."""
    similarities = np.atleast_2d(similarities)
    sums = similarities.sum(axis=1)
    bad = np.flatnonzero(np.abs(sums - 1.0) > ROW_SUM_TOL)
    if bad.size:
        raise ValueError(f'Similarity row {bad[0]} sums to {sums[bad[0]]:.8g}'
                         ', expected 1.')
    return float(np.mean(entropy(similarities, axis=1)))


def sfc_grad(bank: MemoryBank, indices: np.ndarray,
             features: np.ndarray) -> np.ndarray:
    """Gradient of ``loss_sfc`` w.r.t. the target features; bank rows are
    constants."""
    scores = bank.logits(indices, features)
    log_p = log_softmax(scores, axis=1)
    log_p[~np.isfinite(log_p)] = 0.0
    p = softmax(scores, axis=1)
    h = -np.sum(p * log_p, axis=1, keepdims=True)
    grad_scores = -p * (log_p + h) / features.shape[0]
    return grad_scores @ bank.V / bank.tau


# Target one-vs-all entropy


def loss_tova(p_pos: np.ndarray, p_neg: np.ndarray) -> float:
    """Mean over the target batch of the summed binary OVA entropies."""
    p_pos, p_neg = np.atleast_2d(p_pos), np.atleast_2d(p_neg)
    return float(np.mean(np.sum(entr(p_pos) + entr(p_neg), axis=1)))


def tova_grad(logits: np.ndarray) -> np.ndarray:
    b = logits.shape[0]
    gap = _pair_gap(logits)
    pairs = softmax(np.stack([gap, np.zeros_like(gap)], axis=2), axis=2)
    # dH_b/du = -u p+ p-
    grad_gap = -gap * pairs[:, :, 0] * pairs[:, :, 1]
    return _scatter_pair_grad(grad_gap / b)
