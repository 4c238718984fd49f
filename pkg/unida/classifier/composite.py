from dataclasses import dataclass
from enum import IntEnum

import numpy as np
from scipy.special import softmax

# Slack on the probability simplex checks.
SIMPLEX_TOL = 1e-8


class ESLBranch(IntEnum):
    """Case of the entropy-strengthened loss; the value is the sign applied
    to the MC entropy."""
    SHARPEN = 1
    SKIP = 0
    FLATTEN = -1


@dataclass(frozen=True)
class ProbabilityBundle:
    """MC distribution and the K OVA binary distributions of one sample.

    Attributes:
        p_mc (np.ndarray): Length-K softmax over the MC logits.
        p_pos (np.ndarray): p+ of each OVA predictor (in-class).
        p_neg (np.ndarray): p- of each OVA predictor (others).
    """
    p_mc: np.ndarray
    p_pos: np.ndarray
    p_neg: np.ndarray

    def __post_init__(self) -> None:
        k = self.p_mc.shape[0]
        if self.p_mc.ndim != 1 or self.p_pos.shape != (k, ) \
                or self.p_neg.shape != (k, ):
            raise ValueError('p_mc, p_pos and p_neg must be vectors of the '
                             'same length.')
        _check_simplex(self.p_mc[None, :], self.p_pos[None, :],
                       self.p_neg[None, :])

    @property
    def num_classes(self) -> int:
        return self.p_mc.shape[0]


@dataclass(frozen=True)
class ProbabilityBatch:
    """Row-stacked ProbabilityBundles of shape (B, K) each."""
    p_mc: np.ndarray
    p_pos: np.ndarray
    p_neg: np.ndarray

    def __len__(self) -> int:
        return self.p_mc.shape[0]

    @property
    def num_classes(self) -> int:
        return self.p_mc.shape[1]

    def __getitem__(self, i: int) -> ProbabilityBundle:
        return ProbabilityBundle(self.p_mc[i], self.p_pos[i], self.p_neg[i])

    def mc_argmax(self) -> np.ndarray:
        # np.argmax returns the first maximum: ties go to the lowest index.
        return np.argmax(self.p_mc, axis=1)

    def selected_pairs(self):
        """(p+, p-) of the OVA predictor of each row's MC argmax class."""
        k = self.mc_argmax()
        rows = np.arange(len(self))
        return self.p_pos[rows, k], self.p_neg[rows, k]


@dataclass(frozen=True)
class Decision:
    """Open-set prediction for one target sample.

    ``predicted_class`` equals ``num_classes`` (the UNKNOWN index) when the
    OVA predictor of the MC argmax class rejects the sample.
    """
    predicted_class: int
    mc_argmax: int
    paradox_score: float
    num_classes: int

    @property
    def is_unknown(self) -> bool:
        return self.predicted_class == self.num_classes


@dataclass(frozen=True)
class DecisionBatch:
    """Vectorised decisions; ``predicted_class`` uses K for UNKNOWN."""
    predicted_class: np.ndarray
    mc_argmax: np.ndarray
    paradox_score: np.ndarray
    num_classes: int

    def __len__(self) -> int:
        return self.predicted_class.shape[0]

    def __getitem__(self, i: int) -> Decision:
        return Decision(int(self.predicted_class[i]), int(self.mc_argmax[i]),
                        float(self.paradox_score[i]), self.num_classes)

    @property
    def is_unknown(self) -> np.ndarray:
        return self.predicted_class == self.num_classes


def _check_simplex(p_mc: np.ndarray, p_pos: np.ndarray,
                   p_neg: np.ndarray) -> None:
    for name, arr in (('p_mc', p_mc), ('p_pos', p_pos), ('p_neg', p_neg)):
        if np.any(arr < -SIMPLEX_TOL) or np.any(arr > 1 + SIMPLEX_TOL):
            raise ValueError(f'{name} has entries outside [0, 1].')
    if np.any(np.abs(p_mc.sum(axis=1) - 1.0) > SIMPLEX_TOL):
        raise ValueError('p_mc rows must sum to 1.')
    if np.any(np.abs(p_pos + p_neg - 1.0) > SIMPLEX_TOL):
        raise ValueError('Every OVA pair must sum to 1.')


def _split_logits(logits: np.ndarray) -> int:
    if logits.shape[-1] % 2 != 0:
        raise ValueError(f'Composite logits need an even length, got '
                         f'{logits.shape[-1]}.')
    if logits.shape[-1] < 4:
        raise ValueError('Composite logits need K >= 2 classes (length >= '
                         f'4), got length {logits.shape[-1]}.')
    if not np.all(np.isfinite(logits)):
        raise ValueError('Composite logits must be finite.')
    return logits.shape[-1] // 2


def bundles_from_logits(logits: np.ndarray) -> ProbabilityBatch:
    """Probabilities of a (B, 2K) logit matrix.

    p_mc is the softmax over columns 0..K-1; OVA pair k is the softmax over
    (logit_k, logit_{K+k}).
    """
    logits = np.atleast_2d(np.asarray(logits, dtype=float))
    k = _split_logits(logits)
    p_mc = softmax(logits[:, :k], axis=1)
    pairs = softmax(np.stack([logits[:, :k], logits[:, k:]], axis=2), axis=2)
    return ProbabilityBatch(p_mc, pairs[:, :, 0], pairs[:, :, 1])


def bundle_from_logits(logits: np.ndarray) -> ProbabilityBundle:
    """ProbabilityBundle of a single length-2K logit vector."""
    logits = np.asarray(logits, dtype=float)
    if logits.ndim != 1:
        raise ValueError(f'Expected a logit vector, got shape {logits.shape}.')
    return bundles_from_logits(logits[None, :])[0]


def decide_batch(batch: ProbabilityBatch) -> DecisionBatch:
    """Classifier-paradox rule over a batch.

    With k the MC argmax, a row is assigned class k when p+_k >= p-_k and
    UNKNOWN (index K) otherwise; the paradox score is p-_k.
    """
    k = batch.mc_argmax()
    p_pos, p_neg = batch.selected_pairs()
    predicted = np.where(p_pos >= p_neg, k, batch.num_classes)
    return DecisionBatch(predicted, k, p_neg.copy(), batch.num_classes)


def decide(bundle: ProbabilityBundle) -> Decision:
    """Classifier-paradox rule for one sample."""
    batch = ProbabilityBatch(bundle.p_mc[None, :], bundle.p_pos[None, :],
                             bundle.p_neg[None, :])
    return decide_batch(batch)[0]


def _check_margin(m: float) -> None:
    if not 0.0 <= m < 1.0:
        raise ValueError(f'Margin must lie in [0, 1), got {m}.')


def esl_branches(batch: ProbabilityBatch, m: float) -> np.ndarray:
    """ESLBranch value of every row as an int array in {-1, 0, 1}.

    SHARPEN when p+ - p- > m, FLATTEN when p+ - p- < -m and SKIP on the
    closed band |p+ - p-| <= m, using the OVA pair of the MC argmax class.
    """
    _check_margin(m)
    p_pos, p_neg = batch.selected_pairs()
    gap = p_pos - p_neg
    branches = np.full(len(batch), int(ESLBranch.SKIP), dtype=int)
    branches[gap > m] = int(ESLBranch.SHARPEN)
    branches[gap < -m] = int(ESLBranch.FLATTEN)
    return branches


def esl_branch(bundle: ProbabilityBundle, m: float) -> ESLBranch:
    batch = ProbabilityBatch(bundle.p_mc[None, :], bundle.p_pos[None, :],
                             bundle.p_neg[None, :])
    return ESLBranch(int(esl_branches(batch, m)[0]))
