from .activations import ReLU, Tanh
from .checkpoint import load_checkpoint, save_checkpoint
from .network import (ForwardCache, backward, classifier_logits,
                      extract_features, forward)
from .params import (ClassifierHeadParams, FeatureExtractorParams,
                     GradientBundle, flatten_params, init_params,
                     unflatten_params)

__all__ = [
    'ReLU', 'Tanh', 'load_checkpoint', 'save_checkpoint', 'ForwardCache',
    'backward', 'classifier_logits', 'extract_features', 'forward',
    'ClassifierHeadParams', 'FeatureExtractorParams', 'GradientBundle',
    'flatten_params', 'init_params', 'unflatten_params'
]
