from dataclasses import dataclass, field, replace
from typing import Optional, Set

import numpy as np

DOMAINS = ('source', 'target')


@dataclass(frozen=True)
class LabelSplit:
    """Sizes of the shared, source-private and target-private class sets.

    Global class ids are laid out as shared classes first
    (0..n_shared-1), then source-private, then target-private, so source
    labels are exactly the classifier indices 0..K-1.
    """
    n_shared: int
    n_source_private: int
    n_target_private: int

    def __post_init__(self) -> None:
        if self.n_shared < 1:
            raise ValueError(f'n_shared must be >= 1, got {self.n_shared}.')
        if self.n_source_private < 0 or self.n_target_private < 0:
            raise ValueError('Private class counts must be non-negative.')

    @property
    def num_source_classes(self) -> int:
        """K, the number of source classes."""
        return self.n_shared + self.n_source_private

    @property
    def num_classes(self) -> int:
        return self.num_source_classes + self.n_target_private

    def shared_classes(self) -> Set[int]:
        return set(range(self.n_shared))

    def source_private_classes(self) -> Set[int]:
        return set(range(self.n_shared, self.num_source_classes))

    def target_private_classes(self) -> Set[int]:
        return set(range(self.num_source_classes, self.num_classes))

    def source_classes(self) -> Set[int]:
        return self.shared_classes() | self.source_private_classes()

    def target_classes(self) -> Set[int]:
        return self.shared_classes() | self.target_private_classes()

    def describe(self) -> str:
        return (f'|Ls∩Lt|={self.n_shared} |Ls-Lt|={self.n_source_private} '
                f'|Lt-Ls|={self.n_target_private} (K={self.num_source_classes})')


@dataclass
class LabeledDataset:
    """Feature vectors of one domain with global class ids.

    Target labels are for evaluation only; ``without_labels`` gives the view
    training is allowed to see.
    """
    features: np.ndarray
    labels: Optional[np.ndarray]
    domain: str
    ids: np.ndarray = field(default=None)

    def __post_init__(self) -> None:
        if self.domain not in DOMAINS:
            raise ValueError(f'Domain must be one of {DOMAINS}, got '
                             f'{self.domain}.')
        self.features = np.asarray(self.features, dtype=float)
        if self.features.ndim != 2 or self.features.shape[0] < 1:
            raise ValueError(f'{self.domain} dataset needs a non-empty '
                             f'(N, D) feature matrix, got '
                             f'{self.features.shape}.')
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=int)
            if self.labels.shape != (len(self), ):
                raise ValueError(f'{self.labels.size} labels for '
                                 f'{len(self)} samples.')
        if self.ids is None:
            self.ids = np.arange(len(self))
        self.ids = np.asarray(self.ids, dtype=int)
        if self.ids.shape != (len(self), ):
            raise ValueError(f'{self.ids.size} ids for {len(self)} samples.')

    def __len__(self) -> int:
        return self.features.shape[0]

    @property
    def input_dim(self) -> int:
        return self.features.shape[1]

    @property
    def has_labels(self) -> bool:
        return self.labels is not None

    def classes(self) -> Set[int]:
        if self.labels is None:
            raise ValueError(f'The {self.domain} dataset carries no labels.')
        return set(np.unique(self.labels).tolist())

    def without_labels(self) -> 'LabeledDataset':
        return replace(self, features=self.features.copy(), labels=None,
                       ids=self.ids.copy())


@dataclass(frozen=True)
class ShiftSpec:
    """Class generators of both domains and the target transform.

    Attributes:
        means (np.ndarray): (n_classes, D) mean of each global class id.
        covariance_scale (float): Standard deviation of the isotropic
            Gaussian noise around each mean (0 gives noiseless samples).
        rotation (float): Angle in radians, in [0, 2*pi), of the target
            rotation in the plane of the first two coordinates.
        translation (np.ndarray): (D,) translation added to target samples.
        samples_per_class (int): Samples drawn per class and domain.
        seed (int): Seed of the sampler.
    """
    means: np.ndarray
    covariance_scale: float = 1.0
    rotation: float = np.pi / 6
    translation: Optional[np.ndarray] = None
    samples_per_class: int = 50
    seed: int = 0

    def __post_init__(self) -> None:
        if self.means.ndim != 2 or self.means.shape[1] < 2:
            raise ValueError('Class means must be an (n_classes, D) matrix '
                             'with D >= 2.')
        if not 0.0 <= self.rotation < 2 * np.pi:
            raise ValueError(f'Rotation must lie in [0, 2*pi), got '
                             f'{self.rotation}.')
        if not self.covariance_scale >= 0:
            raise ValueError('covariance_scale must be non-negative, got '
                             f'{self.covariance_scale}.')
        if self.samples_per_class < 1:
            raise ValueError('samples_per_class must be >= 1.')
        if self.translation is not None and \
                np.shape(self.translation) != (self.input_dim, ):
            raise ValueError(f'Translation must have length {self.input_dim}.')

    @property
    def input_dim(self) -> int:
        return self.means.shape[1]

    def rotation_matrix(self) -> np.ndarray:
        """Rotation of the (x0, x1) plane, identity elsewhere."""
        r = np.eye(self.input_dim)
        c, s = np.cos(self.rotation), np.sin(self.rotation)
        r[:2, :2] = [[c, -s], [s, c]]
        return r
