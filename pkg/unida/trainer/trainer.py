import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from tqdm import tqdm

from unida.classifier.composite import (DecisionBatch, bundles_from_logits,
                                        decide_batch)
from unida.data.dataset import LabeledDataset
from unida.losses.objective import (TARGET_TERMS, LossWeights,
                                    compute_objective)
from unida.memory.memory_bank import MemoryBank
from unida.metrics.open_set import MetricsReport, evaluate, format_report
from unida.nn.network import (backward, classifier_logits, extract_features,
                              forward)
from unida.nn.params import (ClassifierHeadParams, FeatureExtractorParams,
                             init_params)
from unida.utils.exceptions import NumericalError
from unida.utils.seeding import rng_for

from .optimizer import OptimizerState, step
from .sampler import BatchSampler

logger = logging.getLogger(__name__)

DTYPES = {'float64': np.float64, 'float32': np.float32}


@dataclass(frozen=True)
class TrainConfig:
    """Everything one training run needs besides the data.

    ``iterations_per_epoch`` of None means ceil(max(N_s, N_t) / batch_size).
    ``disabled`` names target terms left out of the objective.
    """
    batch_size: int = 36
    epochs: int = 30
    weights: LossWeights = field(default_factory=LossWeights)
    tau: float = 0.05
    lr_head: float = 0.02
    lr_extractor: float = 0.002
    momentum: float = 0.9
    weight_decay: float = 0.0005
    schedule_a: float = 10.0
    schedule_b: float = 0.75
    seed: int = 0
    iterations_per_epoch: Optional[int] = None
    dtype: str = 'float64'
    disabled: Tuple[str, ...] = ()
    depth: int = 2
    width: int = 64
    feature_dim: int = 32
    activation: str = 'tanh'

    def __post_init__(self) -> None:
        if self.batch_size < 2:
            raise ValueError(f'batch_size must be >= 2, got '
                             f'{self.batch_size}.')
        if self.epochs < 1:
            raise ValueError(f'epochs must be >= 1, got {self.epochs}.')
        if self.iterations_per_epoch is not None \
                and self.iterations_per_epoch < 1:
            raise ValueError('iterations_per_epoch must be >= 1.')
        if self.dtype not in DTYPES:
            raise ValueError(f'dtype must be one of {list(DTYPES)}.')
        unknown = set(self.disabled) - set(TARGET_TERMS)
        if unknown:
            raise ValueError(f'Unknown loss terms {sorted(unknown)}.')


@dataclass
class TrainResult:
    """Output of ``train``: final parameters and the logs of the run."""
    params: FeatureExtractorParams
    head: ClassifierHeadParams
    history: List[MetricsReport]
    loss_log: List[Dict[str, float]]
    bank: np.ndarray


def infer_num_classes(source: LabeledDataset) -> int:
    """K from the source labels, which must be exactly 0..K-1."""
    if source.labels is None:
        raise ValueError('The source dataset must be labeled.')
    classes = np.unique(source.labels)
    k = classes.size
    if not np.array_equal(classes, np.arange(k)):
        raise ValueError('Source labels must be the contiguous range '
                         f'0..K-1, got {classes.tolist()}.')
    if k < 2:
        raise ValueError(f'Training needs K >= 2 source classes, got {k}.')
    return k


def predict(params: FeatureExtractorParams, head: ClassifierHeadParams,
            inputs: np.ndarray) -> DecisionBatch:
    """Classifier-paradox decisions for raw inputs."""
    logits = classifier_logits(head, extract_features(params, inputs))
    return decide_batch(bundles_from_logits(logits))


def shared_classes(source: LabeledDataset,
                   target: LabeledDataset) -> List[int]:
    return sorted(source.classes() & target.classes())


class Trainer:
    """Runs the UniDA training loop over a source and a target domain.

    Each epoch refreshes the memory bank from a full pass over the target
    set. Each iteration then samples one batch per domain, extracts features,
    writes the target features into the bank, computes neighbor
    similarities and classifier probabilities, evaluates the source and
    target losses, and takes one SGD step on the weighted sum.

    Args:
        source (LabeledDataset): Labeled source domain.
        target (LabeledDataset): Target domain; its labels (if any) are used
            for the per-epoch evaluation only.
        config (TrainConfig): Run settings.
        init (Optional[Tuple[FeatureExtractorParams, ClassifierHeadParams]]):
            Warm-start parameters; seeded random initialization otherwise.
        progress (bool): Show a tqdm progress bar on stderr.
    """

    def __init__(self,
                 source: LabeledDataset,
                 target: LabeledDataset,
                 config: TrainConfig,
                 init: Optional[Tuple[FeatureExtractorParams,
                                      ClassifierHeadParams]] = None,
                 progress: bool = True) -> None:
        if len(source) == 0 or len(target) == 0:
            raise ValueError('Both domains need at least one sample.')
        if source.input_dim != target.input_dim:
            raise ValueError(f'Source has {source.input_dim} input columns, '
                             f'target has {target.input_dim}.')
        self.config = config
        self.num_classes = infer_num_classes(source)
        self.dtype = DTYPES[config.dtype]
        self.xs = source.features.astype(self.dtype)
        self.ys = source.labels
        self.xt = target.features.astype(self.dtype)
        self.target_labels = target.labels
        self.shared = shared_classes(source, target) \
            if target.has_labels else []
        self.progress = progress

        if init is None:
            params, head = init_params(target.input_dim,
                                       config.feature_dim,
                                       self.num_classes,
                                       depth=config.depth,
                                       width=config.width,
                                       activation=config.activation,
                                       rng=rng_for(config.seed, 'init'),
                                       dtype=self.dtype)
        else:
            params, head = init[0].copy(), init[1].copy()
            if params.input_dim != target.input_dim \
                    or head.num_classes != self.num_classes:
                raise ValueError('Warm-start parameters do not match the '
                                 'data (input dimension or K).')
            params, head = params.astype(self.dtype), head.astype(self.dtype)
        self.params, self.head = params, head

        self.iterations = config.iterations_per_epoch or math.ceil(
            max(len(source), len(target)) / config.batch_size)
        self.bank = MemoryBank(len(target), head.feature_dim, config.tau)
        self.opt = OptimizerState.create(
            params,
            head,
            total_iterations=config.epochs * self.iterations,
            lr_head=config.lr_head,
            lr_extractor=config.lr_extractor,
            momentum=config.momentum,
            weight_decay=config.weight_decay,
            schedule_a=config.schedule_a,
            schedule_b=config.schedule_b)
        shuffle = rng_for(config.seed, 'shuffle')
        self.source_sampler = BatchSampler(len(source), config.batch_size,
                                           shuffle)
        self.target_sampler = BatchSampler(len(target), config.batch_size,
                                           shuffle)
        self.history: List[MetricsReport] = []
        self.loss_log: List[Dict[str, float]] = []

    def train_iteration(self, epoch: int, iteration: int) -> Dict[str, float]:
        s_idx = next(self.source_sampler)
        t_idx = next(self.target_sampler)
        n_s = s_idx.size

        batch = np.concatenate([self.xs[s_idx], self.xt[t_idx]], axis=0)
        features, cache = forward(self.params, batch)
        f_t = features[n_s:]
        self.bank.update_batch(t_idx, f_t)
        logits = classifier_logits(self.head, features)

        report, grads = compute_objective(logits[:n_s],
                                          self.ys[s_idx],
                                          logits[n_s:],
                                          f_t,
                                          t_idx,
                                          self.bank,
                                          self.config.weights,
                                          disabled=self.config.disabled)
        if not np.isfinite(report.total):
            raise NumericalError(f'Non-finite loss at epoch {epoch}, '
                                 f'iteration {iteration}: {report}')

        grad_logits = np.concatenate(
            [grads.source_logits, grads.target_logits], axis=0)
        grad_features = np.concatenate(
            [np.zeros((n_s, features.shape[1])), grads.target_features],
            axis=0)
        bundle = backward(self.params, self.head, cache,
                          grad_logits.astype(self.dtype),
                          grad_features.astype(self.dtype))
        step(self.params, self.head, bundle, self.opt)
        return {'epoch': epoch, 'iteration': iteration, **report.to_dict()}

    def evaluate(self) -> Optional[MetricsReport]:
        """Metrics of the current parameters on the whole target set."""
        if self.target_labels is None:
            return None
        decisions = predict(self.params, self.head, self.xt)
        return evaluate(decisions, self.target_labels, self.shared)

    def fit(self) -> TrainResult:
        cfg = self.config
        logger.info(
            'Training K=%d on %d source / %d target samples: %d epochs x %d '
            'iterations, batch %d, disabled terms %s.', self.num_classes,
            len(self.xs), len(self.xt), cfg.epochs, self.iterations,
            cfg.batch_size, list(cfg.disabled) or 'none')
        total = cfg.epochs * self.iterations
        with tqdm(total=total, disable=not self.progress,
                  desc='train') as bar:
            for epoch in range(1, cfg.epochs + 1):
                self.bank.initialize(extract_features(self.params, self.xt))
                self.source_sampler.start_epoch()
                self.target_sampler.start_epoch()
                for iteration in range(1, self.iterations + 1):
                    record = self.train_iteration(epoch, iteration)
                    self.loss_log.append(record)
                    bar.update(1)
                    bar.set_postfix(loss=f'{record["total"]:.4f}')
                report = self.evaluate()
                if report is not None:
                    self.history.append(report)
                    logger.info('Epoch %d/%d: %s', epoch, cfg.epochs,
                                format_report(report))
        return TrainResult(self.params, self.head, self.history,
                           self.loss_log, self.bank.snapshot())


def train(source: LabeledDataset,
          target: LabeledDataset,
          config: TrainConfig,
          init: Optional[Tuple[FeatureExtractorParams,
                               ClassifierHeadParams]] = None,
          progress: bool = False) -> TrainResult:
    """Train from scratch (or ``init``) and return the final state."""
    return Trainer(source, target, config, init=init, progress=progress).fit()
