import logging
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .dataset import LabeledDataset, LabelSplit, ShiftSpec

logger = logging.getLogger(__name__)

MEAN_LAYOUTS = ('circle', 'sphere')


def class_means(n_classes: int,
                dim: int,
                radius: float = 5.0,
                layout: str = 'circle',
                seed: int = 0) -> np.ndarray:
    """Mean vector of every global class id.

    Args:
        n_classes (int): Number of classes (all partitions together).
        dim (int): Input dimension, at least 2.
        radius (float): Distance of every mean from the origin.
        layout (str): ``circle`` spaces the means evenly on a circle in the
            first two coordinates; ``sphere`` draws seeded uniform
            directions in all coordinates.
        seed (int): Seed of the ``sphere`` layout.

    Returns:
        np.ndarray: (n_classes, dim) matrix of means.
    """
    if dim < 2:
        raise ValueError(f'Input dimension must be >= 2, got {dim}.')
    if n_classes < 1:
        raise ValueError(f'Need at least one class, got {n_classes}.')
    means = np.zeros((n_classes, dim))
    if layout == 'circle':
        angles = 2 * np.pi * np.arange(n_classes) / n_classes
        means[:, 0] = radius * np.cos(angles)
        means[:, 1] = radius * np.sin(angles)
    elif layout == 'sphere':
        directions = np.random.default_rng(seed).standard_normal(
            (n_classes, dim))
        directions /= np.linalg.norm(directions, axis=1, keepdims=True)
        means = radius * directions
    else:
        raise ValueError(f'Unknown mean layout {layout}; expected one of '
                         f'{MEAN_LAYOUTS}.')
    return means


def make_shift(split: LabelSplit,
               input_dim: int = 16,
               samples_per_class: int = 50,
               radius: float = 10.0,
               layout: str = 'sphere',
               covariance_scale: float = 1.0,
               rotation_deg: float = 30.0,
               translation: Union[float, Sequence[float]] = 0.0,
               seed: int = 0) -> ShiftSpec:
    """ShiftSpec from the scalar knobs used in config files."""
    means = class_means(split.num_classes, input_dim, radius, layout, seed)
    rotation = float(np.deg2rad(rotation_deg % 360.0))
    translation = np.broadcast_to(np.asarray(translation, dtype=float),
                                  (input_dim, )).copy()
    return ShiftSpec(means=means,
                     covariance_scale=covariance_scale,
                     rotation=rotation,
                     translation=translation,
                     samples_per_class=samples_per_class,
                     seed=seed)


def _sample_domain(classes: Sequence[int], shift: ShiftSpec,
                   rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    n = shift.samples_per_class
    labels = np.repeat(np.asarray(classes, dtype=int), n)
    noise = rng.standard_normal((labels.size, shift.input_dim))
    features = shift.means[labels] + shift.covariance_scale * noise
    return features, labels


def generate(
    split: LabelSplit,
    shift: ShiftSpec,
    seed: Optional[int] = None,
) -> Tuple[LabeledDataset, LabeledDataset]:
    """Draw a source and a target domain realizing ``split``.

    Both domains sample isotropic Gaussians around the class means; target
    samples are then rotated and translated by ``shift``. The source holds
    shared and source-private classes, the target shared and target-private
    classes.

    Args:
        split (LabelSplit): Label-set division.
        shift (ShiftSpec): Class generators and target transform; its means
            must cover all ``split.num_classes`` global ids.
        seed (Optional[int]): Overrides ``shift.seed`` when given.

    Returns:
        Tuple[LabeledDataset, LabeledDataset]: source and target datasets.
    """
    if shift.means.shape[0] < split.num_classes:
        raise ValueError(f'ShiftSpec has {shift.means.shape[0]} class means, '
                         f'the split needs {split.num_classes}.')
    rng = np.random.default_rng(shift.seed if seed is None else seed)
    source_classes = sorted(split.source_classes())
    target_classes = sorted(split.target_classes())

    xs, ys = _sample_domain(source_classes, shift, rng)
    xt, yt = _sample_domain(target_classes, shift, rng)
    xt = xt @ shift.rotation_matrix().T
    if shift.translation is not None:
        xt = xt + shift.translation

    source = LabeledDataset(xs, ys, 'source')
    target = LabeledDataset(xt, yt, 'target')
    logger.info('Generated source (%d samples) and target (%d samples): %s',
                len(source), len(target), split.describe())
    return source, target
