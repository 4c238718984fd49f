from .ablation import SOURCE_ONLY
from .optimizer import OptimizerState, lr_at, sgd_momentum_update, step
from .sampler import BatchSampler
from .trainer import (DTYPES, TrainConfig, Trainer, TrainResult,
                      infer_num_classes, predict, shared_classes, train)

__all__ = [
    'SOURCE_ONLY', 'OptimizerState', 'lr_at', 'sgd_momentum_update', 'step',
    'BatchSampler', 'DTYPES', 'TrainConfig', 'Trainer', 'TrainResult',
    'infer_num_classes', 'predict', 'shared_classes', 'train'
]
