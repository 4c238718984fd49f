"""Finite-difference verification of the analytic loss gradients.

Every draw builds a small random network, a source and a target batch and a
memory bank, then compares the analytic parameter gradient of each loss
(through the classifier head, the l2 normalization and the extractor) with
central differences. The hardest negatives and entropy-strengthened branches
are frozen at the unperturbed point, and bank rows stay constant.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np

from unida.classifier.composite import bundles_from_logits, esl_branches
from unida.losses.losses import (ce_grad, esl_grad, hardest_negatives,
                                 loss_ce, loss_esl, loss_sfc, loss_sova,
                                 loss_tova, sfc_grad, sova_grad, tova_grad)
from unida.losses.objective import (FrozenSelections, LossWeights,
                                    compute_objective, loss_total)
from unida.memory.memory_bank import MemoryBank
from unida.nn.network import backward, classifier_logits, forward
from unida.nn.params import flatten_params, init_params, unflatten_params

logger = logging.getLogger(__name__)

LOSS_NAMES = ('ce', 'sova', 'esl', 'sfc', 'tova')
COMPOSITE = 'total'
DEFAULT_CLASS_COUNTS = (2, 3, 5, 10)
# Denominator floor of the per-coordinate relative error; equals the default
# central-difference step.
ERROR_FLOOR = 1e-5


@dataclass
class GradCheckResult:
    name: str
    max_rel_error: float
    draws: int
    passed: bool


@dataclass
class GradCheckReport:
    losses: List[GradCheckResult]
    composite: GradCheckResult
    tolerance: float
    failures: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.composite.passed and all(r.passed for r in self.losses)

    def lines(self) -> List[str]:
        """One line per loss term, without the composite objective."""
        return [_format(r) for r in self.losses]

    def composite_line(self) -> str:
        return 'objective ' + _format(self.composite)


def _format(result: GradCheckResult) -> str:
    status = 'PASS' if result.passed else 'FAIL'
    return (f'{result.name:<6} max rel error {result.max_rel_error:.3e} '
            f'over {result.draws} draws  {status}')


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """max_i |a_i - n_i| / max(|a_i| + |n_i|, ERROR_FLOOR)."""
    denom = np.maximum(np.abs(analytic) + np.abs(numeric), ERROR_FLOOR)
    return float(np.max(np.abs(analytic - numeric) / denom))


@dataclass
class _Draw:
    params: object
    head: object
    batch: np.ndarray
    n_source: int
    labels: np.ndarray
    indices: np.ndarray
    bank: MemoryBank
    weights: LossWeights
    selections: FrozenSelections


def _make_draw(rng: np.random.Generator, num_classes: int) -> _Draw:
    input_dim, feature_dim = 4, 5
    params, head = init_params(input_dim, feature_dim, num_classes, depth=2,
                               width=6, rng=rng)
    # Scale the head up so probabilities leave the uniform regime and the
    # entropy-strengthened branches are exercised.
    head.weight *= rng.uniform(2.0, 6.0)
    n_source, n_target, bank_size = 4, 3, 8
    batch = rng.standard_normal((n_source + n_target, input_dim))
    labels = rng.integers(0, num_classes, size=n_source)
    indices = rng.choice(bank_size, size=n_target, replace=False)

    bank_rows = rng.standard_normal((bank_size, feature_dim))
    bank = MemoryBank(bank_size, feature_dim, tau=rng.uniform(0.05, 0.5))
    bank.initialize(bank_rows /
                    np.linalg.norm(bank_rows, axis=1, keepdims=True))
    features, _ = forward(params, batch)
    bank.update_batch(indices, features[n_source:])

    weights = LossWeights(alpha=rng.uniform(0.01, 1.0),
                          beta=rng.uniform(0.01, 1.0),
                          gamma=rng.uniform(0.01, 1.0),
                          margin=rng.uniform(0.0, 0.2))
    logits = classifier_logits(head, features)
    selections = FrozenSelections(
        hardest_negatives(
            bundles_from_logits(logits[:n_source]).p_pos, labels),
        esl_branches(bundles_from_logits(logits[n_source:]), weights.margin))
    return _Draw(params, head, batch, n_source, labels, indices, bank,
                 weights, selections)


def _values(draw: _Draw, features: np.ndarray,
            logits: np.ndarray) -> Dict[str, float]:
    n, sel, m = draw.n_source, draw.selections, draw.weights.margin
    source = bundles_from_logits(logits[:n])
    target = bundles_from_logits(logits[n:])
    values = {
        'ce': loss_ce(source.p_mc, draw.labels),
        'sova': loss_sova(source.p_pos, draw.labels, sel.negatives),
        'esl': loss_esl(target, m, sel.branches),
        'sfc': loss_sfc(draw.bank.similarities(draw.indices, features[n:])),
        'tova': loss_tova(target.p_pos, target.p_neg),
    }
    values[COMPOSITE] = loss_total(weights=draw.weights, **values).total
    return values


def _gradients(name: str, draw: _Draw, features: np.ndarray,
               logits: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Gradients of one term w.r.t. the logits and the features."""
    n, sel, m = draw.n_source, draw.selections, draw.weights.margin
    src, tgt, f_t = logits[:n], logits[n:], features[n:]
    grad_logits = np.zeros_like(logits)
    grad_features = np.zeros_like(features)
    if name == 'ce':
        grad_logits[:n] = ce_grad(src, draw.labels)
    elif name == 'sova':
        grad_logits[:n] = sova_grad(src, draw.labels, sel.negatives)
    elif name == 'esl':
        grad_logits[n:] = esl_grad(tgt, m, sel.branches)
    elif name == 'sfc':
        grad_features[n:] = sfc_grad(draw.bank, draw.indices, f_t)
    elif name == 'tova':
        grad_logits[n:] = tova_grad(tgt)
    elif name == COMPOSITE:
        _, grads = compute_objective(src, draw.labels, tgt, f_t,
                                     draw.indices, draw.bank, draw.weights,
                                     selections=sel)
        grad_logits[:n] = grads.source_logits
        grad_logits[n:] = grads.target_logits
        grad_features[n:] = grads.target_features
    else:
        raise KeyError(f'Unknown loss {name}; expected one of '
                       f'{LOSS_NAMES + (COMPOSITE, )}.')
    return grad_logits, grad_features


def check_draw(draw: _Draw,
               h: float = 1e-5,
               perturbation: float = 0.0) -> Dict[str, float]:
    """Relative error between analytic and numeric gradients of every term.

    ``perturbation`` scales a deliberate error added to the analytic
    gradients.
    """
    features, cache = forward(draw.params, draw.batch)
    logits = classifier_logits(draw.head, features)
    names = LOSS_NAMES + (COMPOSITE, )
    analytic = {}
    for name in names:
        grad_logits, grad_features = _gradients(name, draw, features, logits)
        grad = backward(draw.params, draw.head, cache, grad_logits,
                        grad_features).flatten()
        analytic[name] = grad + perturbation * (1.0 + np.abs(grad))

    theta0 = flatten_params(draw.params, draw.head)
    numeric = {name: np.zeros_like(theta0) for name in names}
    for j in range(theta0.size):
        sides = []
        for delta in (h, -h):
            theta = theta0.copy()
            theta[j] += delta
            params, head = unflatten_params(theta, draw.params, draw.head)
            f, _ = forward(params, draw.batch)
            sides.append(_values(draw, f, classifier_logits(head, f)))
        for name in names:
            numeric[name][j] = (sides[0][name] - sides[1][name]) / (2 * h)
    return {
        name: relative_error(analytic[name], numeric[name])
        for name in names
    }


def run_gradcheck(draws: int = 100,
                  seed: int = 0,
                  tolerance: float = 1e-4,
                  h: float = 1e-5,
                  perturbation: float = 0.0,
                  class_counts: Sequence[int] = DEFAULT_CLASS_COUNTS
                  ) -> GradCheckReport:
    """Check every loss and the overall objective over ``draws`` draws.

    Args:
        draws (int): Random draws per loss; K cycles through
            ``class_counts``.
        seed (int): Seed of the draws.
        tolerance (float): Largest accepted relative error.
        h (float): Central-difference step.
        perturbation (float): Added to every analytic gradient entry; a
            non-zero value must make the check fail.
        class_counts (Sequence[int]): Values of K to cycle through.

    Returns:
        GradCheckReport
    """
    rng = np.random.default_rng(seed)
    worst: Dict[str, float] = {n: 0.0 for n in LOSS_NAMES + (COMPOSITE, )}
    for i in range(draws):
        draw = _make_draw(rng, class_counts[i % len(class_counts)])
        errors = check_draw(draw, h=h, perturbation=perturbation)
        for name, err in errors.items():
            worst[name] = max(worst[name], err)
    results = {
        name: GradCheckResult(name, err, draws, err < tolerance)
        for name, err in worst.items()
    }
    report = GradCheckReport([results[n] for n in LOSS_NAMES],
                             results[COMPOSITE], tolerance)
    report.failures = [
        r.name for r in report.losses + [report.composite] if not r.passed
    ]
    for line in report.lines():
        logger.info(line)
    logger.info(report.composite_line())
    return report
