from dataclasses import asdict, dataclass, field
from typing import Collection, Dict, Optional, Tuple

import numpy as np

from unida.classifier.composite import bundles_from_logits, esl_branches
from unida.memory.memory_bank import MemoryBank

from .losses import (ce_grad, esl_grad, hardest_negatives, loss_ce, loss_esl,
                     loss_sfc, loss_sova, loss_tova, sfc_grad, sova_grad,
                     tova_grad)

# Target-side terms that an ablation may switch off.
TARGET_TERMS = ('esl', 'sfc', 'tova')


@dataclass(frozen=True)
class LossWeights:
    """Trade-offs of the target terms and the ESL margin.

    Defaults follow the reference setting alpha = gamma = 0.05, beta = 0.1,
    m = 0.4.
    """
    alpha: float = 0.05
    beta: float = 0.1
    gamma: float = 0.05
    margin: float = 0.4

    def __post_init__(self) -> None:
        for name in ('alpha', 'beta', 'gamma'):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise ValueError(f'Loss weight {name} must be finite and '
                                 f'non-negative, got {value}.')
        if not 0.0 <= self.margin < 1.0:
            raise ValueError(f'Margin must lie in [0, 1), got {self.margin}.')


@dataclass(frozen=True)
class LossReport:
    """Component losses of one iteration (nats) and their weighted total."""
    ce: float
    sova: float
    esl: float
    sfc: float
    tova: float
    total: float

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


def loss_total(ce: float, sova: float, esl: float, sfc: float, tova: float,
               weights: LossWeights) -> LossReport:
    """(ce + sova) + alpha * sfc + beta * tova + gamma * esl."""
    total = (ce + sova) + weights.alpha * sfc + weights.beta * tova \
        + weights.gamma * esl
    return LossReport(ce=ce, sova=sova, esl=esl, sfc=sfc, tova=tova,
                      total=total)


@dataclass
class FrozenSelections:
    """Discrete choices of one objective evaluation, held fixed so finite
    differences stay on the same branch."""
    negatives: np.ndarray
    branches: np.ndarray


@dataclass
class ObjectiveGradients:
    """Gradients of the total loss w.r.t. the network outputs."""
    source_logits: np.ndarray
    target_logits: np.ndarray
    target_features: np.ndarray
    selections: Optional[FrozenSelections] = field(default=None)


def compute_objective(
    source_logits: np.ndarray,
    source_labels: np.ndarray,
    target_logits: np.ndarray,
    target_features: np.ndarray,
    target_indices: np.ndarray,
    bank: MemoryBank,
    weights: LossWeights,
    disabled: Collection[str] = (),
    selections: Optional[FrozenSelections] = None,
) -> Tuple[LossReport, ObjectiveGradients]:
    """Evaluate the overall objective of one iteration and its gradients.

    Args:
        source_logits (np.ndarray): (B_s, 2K) logits of the source batch.
        source_labels (np.ndarray): (B_s,) source labels in [0, K).
        target_logits (np.ndarray): (B_t, 2K) logits of the target batch.
        target_features (np.ndarray): (B_t, d) normalized target features.
        target_indices (np.ndarray): (B_t,) bank rows of the target batch.
        bank (MemoryBank): Bank already updated with ``target_features``.
        weights (LossWeights): Trade-offs and margin.
        disabled (Collection[str]): Target terms ('esl', 'sfc', 'tova') that
            are not computed; they are reported as 0.
        selections (Optional[FrozenSelections]): Hardest negatives and ESL
            branches to reuse instead of recomputing.

    Returns:
        Tuple[LossReport, ObjectiveGradients]
    """
    unknown = set(disabled) - set(TARGET_TERMS)
    if unknown:
        raise ValueError(f'Cannot disable {sorted(unknown)}; only '
                         f'{TARGET_TERMS} are optional.')
    source = bundles_from_logits(source_logits)
    target = bundles_from_logits(target_logits)
    if selections is None:
        selections = FrozenSelections(
            hardest_negatives(source.p_pos, source_labels),
            esl_branches(target, weights.margin))

    ce = loss_ce(source.p_mc, source_labels)
    sova = loss_sova(source.p_pos, source_labels, selections.negatives)
    grad_source = ce_grad(source_logits, source_labels) \
        + sova_grad(source_logits, source_labels, selections.negatives)

    grad_target = np.zeros_like(target_logits)
    grad_features = np.zeros_like(target_features)
    esl = sfc = tova = 0.0
    if 'esl' not in disabled:
        esl = loss_esl(target, weights.margin, selections.branches)
        grad_target += weights.gamma * esl_grad(
            target_logits, weights.margin, selections.branches)
    if 'tova' not in disabled:
        tova = loss_tova(target.p_pos, target.p_neg)
        grad_target += weights.beta * tova_grad(target_logits)
    if 'sfc' not in disabled:
        sfc = loss_sfc(bank.similarities(target_indices, target_features))
        grad_features += weights.alpha * sfc_grad(bank, target_indices,
                                                  target_features)

    report = loss_total(ce, sova, esl, sfc, tova, weights)
    return report, ObjectiveGradients(grad_source, grad_target, grad_features,
                                      selections)
