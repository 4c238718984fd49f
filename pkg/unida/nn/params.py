from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from unida.registries import ACTIVATION_REGISTRY


@dataclass
class FeatureExtractorParams:
    """Weights and biases of the MLP feature extractor.

    Layer ``l`` maps its input with ``weights[l]`` of shape (out, in) and
    ``biases[l]`` of shape (out,). Every layer but the last is followed by
    the hidden activation; the last layer's output is l2-normalized.
    """
    weights: List[np.ndarray]
    biases: List[np.ndarray]
    activation: str = 'tanh'

    def __post_init__(self) -> None:
        if len(self.weights) == 0:
            raise ValueError('A feature extractor needs at least one layer.')
        if len(self.weights) != len(self.biases):
            raise ValueError(f'{len(self.weights)} weight matrices but '
                             f'{len(self.biases)} bias vectors.')
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.ndim != 2 or b.shape != (w.shape[0], ):
                raise ValueError(f'Layer {i}: weight {w.shape} and bias '
                                 f'{b.shape} do not match.')
            if i > 0 and w.shape[1] != self.weights[i - 1].shape[0]:
                raise ValueError(f'Layer {i} expects {w.shape[1]} inputs but '
                                 f'layer {i - 1} has {w.shape[0]} outputs.')
            if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
                raise ValueError(f'Layer {i} has non-finite parameters.')
        if self.activation not in ACTIVATION_REGISTRY:
            raise KeyError(f'Unknown activation {self.activation}.')

    @property
    def depth(self) -> int:
        return len(self.weights)

    @property
    def input_dim(self) -> int:
        return self.weights[0].shape[1]

    @property
    def feature_dim(self) -> int:
        return self.weights[-1].shape[0]

    def arrays(self) -> List[np.ndarray]:
        """Parameter arrays in a fixed order: W0, b0, W1, b1, ..."""
        out = []
        for w, b in zip(self.weights, self.biases):
            out.extend([w, b])
        return out

    def copy(self) -> 'FeatureExtractorParams':
        return FeatureExtractorParams([w.copy() for w in self.weights],
                                      [b.copy() for b in self.biases],
                                      self.activation)

    def astype(self, dtype) -> 'FeatureExtractorParams':
        return FeatureExtractorParams(
            [w.astype(dtype) for w in self.weights],
            [b.astype(dtype) for b in self.biases], self.activation)


@dataclass
class ClassifierHeadParams:
    """The composite classifier: 2K rows, the first K are the MC logits and
    rows k and K+k form the binary logit pair of OVA predictor k."""
    weight: np.ndarray
    bias: np.ndarray

    def __post_init__(self) -> None:
        rows = self.weight.shape[0]
        if self.weight.ndim != 2 or rows % 2 != 0 or rows == 0:
            raise ValueError('Classifier head needs an even, non-zero number '
                             f'of rows, got weight {self.weight.shape}.')
        if self.bias.shape != (rows, ):
            raise ValueError(f'Bias {self.bias.shape} does not match '
                             f'{rows} head rows.')
        if not (np.all(np.isfinite(self.weight))
                and np.all(np.isfinite(self.bias))):
            raise ValueError('Classifier head has non-finite parameters.')

    @property
    def num_classes(self) -> int:
        return self.weight.shape[0] // 2

    @property
    def feature_dim(self) -> int:
        return self.weight.shape[1]

    def arrays(self) -> List[np.ndarray]:
        return [self.weight, self.bias]

    def copy(self) -> 'ClassifierHeadParams':
        return ClassifierHeadParams(self.weight.copy(), self.bias.copy())

    def astype(self, dtype) -> 'ClassifierHeadParams':
        return ClassifierHeadParams(self.weight.astype(dtype),
                                    self.bias.astype(dtype))


@dataclass
class GradientBundle:
    """Gradients shaped exactly like the extractor and head parameters."""
    extractor_weights: List[np.ndarray]
    extractor_biases: List[np.ndarray]
    head_weight: np.ndarray
    head_bias: np.ndarray

    @classmethod
    def zeros_like(cls, params: FeatureExtractorParams,
                   head: ClassifierHeadParams) -> 'GradientBundle':
        return cls([np.zeros_like(w) for w in params.weights],
                   [np.zeros_like(b) for b in params.biases],
                   np.zeros_like(head.weight), np.zeros_like(head.bias))

    def extractor_arrays(self) -> List[np.ndarray]:
        out = []
        for w, b in zip(self.extractor_weights, self.extractor_biases):
            out.extend([w, b])
        return out

    def head_arrays(self) -> List[np.ndarray]:
        return [self.head_weight, self.head_bias]

    def flatten(self) -> np.ndarray:
        return np.concatenate(
            [a.ravel() for a in self.extractor_arrays() + self.head_arrays()])

    def check_shapes(self, params: FeatureExtractorParams,
                     head: ClassifierHeadParams) -> None:
        """Raise ValueError unless every gradient matches its parameter."""
        pairs = list(zip(self.extractor_arrays(), params.arrays()))
        pairs += list(zip(self.head_arrays(), head.arrays()))
        if len(self.extractor_weights) != params.depth:
            raise ValueError(f'Gradient has {len(self.extractor_weights)} '
                             f'layers, parameters have {params.depth}.')
        for grad, param in pairs:
            if grad.shape != param.shape:
                raise ValueError(f'Gradient shape {grad.shape} does not '
                                 f'match parameter shape {param.shape}.')


def init_params(input_dim: int,
                feature_dim: int,
                num_classes: int,
                depth: int = 2,
                width: int = 64,
                activation: str = 'tanh',
                rng: np.random.Generator = None,
                dtype=np.float64
                ) -> Tuple[FeatureExtractorParams, ClassifierHeadParams]:
    """Initialize extractor and head with U(-1/sqrt(fan_in), 1/sqrt(fan_in)).

    Args:
        input_dim (int): Dimension of the raw input vectors.
        feature_dim (int): Width d of the normalized feature.
        num_classes (int): Number of source classes K; the head has 2K rows.
        depth (int): Number of dense layers of the extractor.
        width (int): Width of every hidden layer.
        activation (str): Registered hidden activation name.
        rng (np.random.Generator): Source of randomness; a seed-0 generator
            is used when omitted.
        dtype: Floating dtype of the returned arrays.

    Returns:
        Tuple[FeatureExtractorParams, ClassifierHeadParams]
    """
    if depth < 1:
        raise ValueError(f'depth must be >= 1, got {depth}')
    if rng is None:
        rng = np.random.default_rng(0)
    sizes = [input_dim] + [width] * (depth - 1) + [feature_dim]
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = 1.0 / np.sqrt(fan_in)
        weights.append(
            rng.uniform(-bound, bound, size=(fan_out, fan_in)).astype(dtype))
        biases.append(rng.uniform(-bound, bound, size=fan_out).astype(dtype))
    bound = 1.0 / np.sqrt(feature_dim)
    head = ClassifierHeadParams(
        rng.uniform(-bound, bound,
                    size=(2 * num_classes, feature_dim)).astype(dtype),
        rng.uniform(-bound, bound, size=2 * num_classes).astype(dtype))
    return FeatureExtractorParams(weights, biases, activation), head


def flatten_params(params: FeatureExtractorParams,
                   head: ClassifierHeadParams) -> np.ndarray:
    """Concatenate every parameter into one vector (GradientBundle order)."""
    return np.concatenate([a.ravel() for a in params.arrays() + head.arrays()])


def unflatten_params(
    vector: np.ndarray, like: FeatureExtractorParams,
    like_head: ClassifierHeadParams
) -> Tuple[FeatureExtractorParams, ClassifierHeadParams]:
    """Inverse of ``flatten_params`` using shapes from ``like``."""
    shapes: Sequence[Tuple[int, ...]] = [
        a.shape for a in like.arrays() + like_head.arrays()
    ]
    total = sum(int(np.prod(s)) for s in shapes)
    if vector.size != total:
        raise ValueError(f'Vector has {vector.size} entries, parameters '
                         f'need {total}.')
    arrays, offset = [], 0
    for shape in shapes:
        n = int(np.prod(shape))
        arrays.append(vector[offset:offset + n].reshape(shape).copy())
        offset += n
    ext = arrays[:-2]
    params = FeatureExtractorParams(ext[0::2], ext[1::2], like.activation)
    return params, ClassifierHeadParams(arrays[-2], arrays[-1])
