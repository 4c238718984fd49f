from dataclasses import dataclass
from typing import List

import numpy as np

from unida.nn.params import (ClassifierHeadParams, FeatureExtractorParams,
                             GradientBundle)


def lr_at(t: int,
          total: int,
          base: float,
          a: float = 10.0,
          b: float = 0.75) -> float:
    """Inverse schedule ``base * (1 + a * t / total) ** (-b)``.

    Raises:
        ValueError: If ``total`` is 0 or ``t`` lies outside [0, total].
    """
    if total <= 0:
        raise ValueError(f'total iterations must be positive, got {total}.')
    if not 0 <= t <= total:
        raise ValueError(f'Iteration {t} outside [0, {total}].')
    return base * (1.0 + a * (t / total))**(-b)


def sgd_momentum_update(param: np.ndarray, grad: np.ndarray,
                        velocity: np.ndarray, lr: float, momentum: float,
                        weight_decay: float) -> None:
    """In place: v <- mu * v + (g + lambda * theta); theta <- theta - lr * v."""
    if not (param.shape == grad.shape == velocity.shape):
        raise ValueError(f'Shape mismatch: parameter {param.shape}, gradient '
                         f'{grad.shape}, velocity {velocity.shape}.')
    velocity *= momentum
    velocity += grad + weight_decay * param
    param -= lr * velocity


@dataclass
class OptimizerState:
    """SGD with momentum over two parameter groups.

    The classifier head (new layers) and the feature extractor each have a
    base learning rate decayed by the inverse schedule over
    ``total_iterations``. Weight decay applies to weights and biases alike.
    """
    extractor_velocity: List[np.ndarray]
    head_velocity: List[np.ndarray]
    total_iterations: int
    lr_head: float = 0.02
    lr_extractor: float = 0.002
    momentum: float = 0.9
    weight_decay: float = 0.0005
    schedule_a: float = 10.0
    schedule_b: float = 0.75
    t: int = 0

    @classmethod
    def create(cls, params: FeatureExtractorParams,
               head: ClassifierHeadParams, total_iterations: int,
               **kwargs) -> 'OptimizerState':
        """Zero momentum buffers shaped like the parameters."""
        return cls([np.zeros_like(a) for a in params.arrays()],
                   [np.zeros_like(a) for a in head.arrays()],
                   total_iterations, **kwargs)

    def current_lrs(self):
        """(head, extractor) learning rates at iteration ``t``."""
        t = min(self.t, self.total_iterations)
        return (lr_at(t, self.total_iterations, self.lr_head,
                      self.schedule_a, self.schedule_b),
                lr_at(t, self.total_iterations, self.lr_extractor,
                      self.schedule_a, self.schedule_b))


def step(params: FeatureExtractorParams, head: ClassifierHeadParams,
         grads: GradientBundle, opt: OptimizerState) -> None:
    """Apply one momentum update to both groups in place and advance t."""
    grads.check_shapes(params, head)
    if len(opt.extractor_velocity) != len(params.arrays()):
        raise ValueError('Optimizer state does not match the extractor.')
    lr_head, lr_extractor = opt.current_lrs()
    for param, grad, vel in zip(params.arrays(), grads.extractor_arrays(),
                                opt.extractor_velocity):
        sgd_momentum_update(param, grad, vel, lr_extractor, opt.momentum,
                            opt.weight_decay)
    for param, grad, vel in zip(head.arrays(), grads.head_arrays(),
                                opt.head_velocity):
        sgd_momentum_update(param, grad, vel, lr_head, opt.momentum,
                            opt.weight_decay)
    opt.t += 1
