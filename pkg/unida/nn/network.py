from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from unida.registries import ACTIVATION_REGISTRY
from unida.utils.exceptions import DegenerateFeatureError, ForwardPassError

from .params import ClassifierHeadParams, FeatureExtractorParams, GradientBundle

# Pre-normalization activations with a smaller norm are treated as zero.
DEGENERATE_NORM = 1e-12


@dataclass
class ForwardCache:
    """Everything the backward pass needs from one forward pass.

    Attributes:
        inputs (List[np.ndarray]): Input of every dense layer; ``inputs[0]``
            is the raw batch.
        pre_activations (List[np.ndarray]): Output of every hidden dense
            layer before the nonlinearity.
        raw (np.ndarray): Output of the last dense layer (B x d).
        norms (np.ndarray): Row norms of ``raw`` (B x 1).
        features (np.ndarray): l2-normalized features (B x d).
        depth (int): Number of dense layers that produced the cache.
    """
    inputs: List[np.ndarray]
    pre_activations: List[np.ndarray]
    raw: np.ndarray
    norms: np.ndarray
    features: np.ndarray
    depth: int

    @property
    def batch(self) -> np.ndarray:
        return self.inputs[0]


def forward(params: FeatureExtractorParams,
            batch: np.ndarray) -> Tuple[np.ndarray, ForwardCache]:
    """Run the extractor and keep the intermediates for ``backward``.

    Args:
        params (FeatureExtractorParams): Extractor parameters.
        batch (np.ndarray): Input matrix of shape (B, D_in), B >= 1.

    Returns:
        Tuple[np.ndarray, ForwardCache]: The (B, d) normalized features and
            the cache.

    Raises:
        ValueError: If the batch is empty, non-finite or has the wrong width.
        DegenerateFeatureError: If a row is the zero vector before
            normalization.
    """
    batch = np.asarray(batch)
    if batch.ndim != 2 or batch.shape[0] < 1:
        raise ValueError(f'Expected a non-empty (B, D_in) batch, got shape '
                         f'{batch.shape}.')
    if batch.shape[1] != params.input_dim:
        raise ValueError(f'Batch has {batch.shape[1]} columns, extractor '
                         f'expects {params.input_dim}.')
    if not np.all(np.isfinite(batch)):
        raise ValueError('Batch contains non-finite entries.')

    act = ACTIVATION_REGISTRY.get(params.activation)
    inputs, pre_activations = [batch], []
    h = batch
    last = params.depth - 1
    for layer, (w, b) in enumerate(zip(params.weights, params.biases)):
        a = h @ w.T + b
        if layer == last:
            raw = a
            break
        pre_activations.append(a)
        h = act.forward(a)
        inputs.append(h)

    norms = np.linalg.norm(raw, axis=1, keepdims=True)
    degenerate = np.flatnonzero(norms[:, 0] <= DEGENERATE_NORM)
    if degenerate.size:
        raise DegenerateFeatureError(
            f'{degenerate.size} feature row(s) have zero norm before '
            f'normalization (first at row {degenerate[0]}).')
    features = raw / norms
    return features, ForwardCache(inputs, pre_activations, raw, norms,
                                  features, params.depth)


def extract_features(params: FeatureExtractorParams,
                     batch: np.ndarray) -> np.ndarray:
    """l2-normalized features of ``batch``; every row has unit norm."""
    features, _ = forward(params, batch)
    return features


def classifier_logits(head: ClassifierHeadParams,
                      features: np.ndarray) -> np.ndarray:
    """Composite classifier logits ``features @ W.T + b`` of shape (B, 2K).

    Columns 0..K-1 are the MC logits; columns k and K+k form the logit pair
    of OVA predictor k.
    """
    features = np.asarray(features)
    if features.ndim != 2 or features.shape[1] != head.feature_dim:
        raise ValueError(f'Features of shape {features.shape} do not match '
                         f'a head over {head.feature_dim} dimensions.')
    return features @ head.weight.T + head.bias


def normalization_backward(cache: ForwardCache,
                           grad_features: np.ndarray) -> np.ndarray:
    """Pull a feature gradient back through ``f = h / ||h||``.

    The Jacobian is ``(I - f f^T) / ||h||`` per row.
    """
    f = cache.features
    radial = np.sum(f * grad_features, axis=1, keepdims=True)
    return (grad_features - f * radial) / cache.norms


def backward(params: FeatureExtractorParams,
             head: ClassifierHeadParams,
             cache: Optional[ForwardCache],
             grad_logits: Optional[np.ndarray],
             grad_features: Optional[np.ndarray] = None) -> GradientBundle:
    """Analytic gradients of a scalar loss w.r.t. every parameter.

    Args:
        params (FeatureExtractorParams): The extractor used in the forward
            pass.
        head (ClassifierHeadParams): The classifier head.
        cache (Optional[ForwardCache]): Cache returned by ``forward`` for the
            same batch.
        grad_logits (Optional[np.ndarray]): dLoss/dlogits of shape (B, 2K),
            or None when the loss does not touch the classifier.
        grad_features (Optional[np.ndarray]): Additional dLoss/dfeatures of
            shape (B, d) for losses defined directly on the normalized
            features.

    Returns:
        GradientBundle: Gradients matching the parameter shapes.

    Raises:
        ForwardPassError: If no cache is given, or it does not belong to a
            forward pass of these parameters with this batch size.
    """
    if cache is None:
        raise ForwardPassError('backward called without a forward pass.')
    if cache.depth != params.depth:
        raise ForwardPassError(f'Cache from a {cache.depth}-layer forward '
                               f'pass, parameters have {params.depth}.')
    n, d = cache.features.shape
    if d != head.feature_dim:
        raise ValueError(f'Head expects {head.feature_dim} features, '
                         f'forward pass produced {d}.')

    grads = GradientBundle.zeros_like(params, head)
    grad_f = np.zeros_like(cache.features)
    if grad_logits is not None:
        if grad_logits.shape != (n, 2 * head.num_classes):
            raise ForwardPassError(
                f'Upstream logit gradient {grad_logits.shape} does not match '
                f'the forward pass ({n}, {2 * head.num_classes}).')
        grads.head_weight = grad_logits.T @ cache.features
        grads.head_bias = grad_logits.sum(axis=0)
        grad_f = grad_f + grad_logits @ head.weight
    if grad_features is not None:
        if grad_features.shape != (n, d):
            raise ForwardPassError(
                f'Upstream feature gradient {grad_features.shape} does not '
                f'match the forward pass ({n}, {d}).')
        grad_f = grad_f + grad_features

    act = ACTIVATION_REGISTRY.get(params.activation)
    delta = normalization_backward(cache, grad_f)
    for layer in range(params.depth - 1, -1, -1):
        h = cache.inputs[layer]
        grads.extractor_weights[layer] = delta.T @ h
        grads.extractor_biases[layer] = delta.sum(axis=0)
        if layer == 0:
            break
        grad_h = delta @ params.weights[layer]
        a = cache.pre_activations[layer - 1]
        delta = grad_h * act.derivative(a, h)
    return grads
