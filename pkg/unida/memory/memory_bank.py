import logging
from typing import Optional

import numpy as np
from scipy.special import softmax

from unida.utils.exceptions import MemoryBankError

logger = logging.getLogger(__name__)

# Tolerance on the unit-norm invariant of stored rows.
NORM_TOL = 1e-6


def _check_normalized(features: np.ndarray, what: str) -> None:
    norms = np.linalg.norm(features, axis=1)
    bad = np.flatnonzero(np.abs(norms - 1.0) > NORM_TOL)
    if bad.size:
        raise MemoryBankError(f'{what}: row {bad[0]} has norm '
                              f'{norms[bad[0]]:.6g}, expected 1.')


class MemoryBank:
    """Current l2-normalized feature of every target sample.

    Row i always stores target sample i. Rows are replaced directly (no
    moving average) and are constants for gradient purposes.

    Args:
        num_samples (int): Number of target samples N_t.
        feature_dim (int): Feature dimension d.
        tau (float): Temperature of the neighbor distribution.

    Examples:
        >>> bank = MemoryBank(num_samples=100, feature_dim=32, tau=0.05)
        >>> bank.initialize(extract_features(params, target.features))
        >>> bank.update_batch(indices, batch_features)
        >>> probs = bank.similarities(indices, batch_features)
    """

    def __init__(self,
                 num_samples: int,
                 feature_dim: int,
                 tau: float = 0.05) -> None:
        if num_samples < 1 or feature_dim < 1:
            raise MemoryBankError(
                f'Bank needs positive sizes, got N_t={num_samples}, '
                f'd={feature_dim}.')
        if not tau > 0:
            raise MemoryBankError(f'Temperature must be positive, got {tau}.')
        self.num_samples = num_samples
        self.feature_dim = feature_dim
        self.tau = float(tau)
        self.V: Optional[np.ndarray] = None

    @property
    def initialized(self) -> bool:
        return self.V is not None

    def initialize(self, features_all: np.ndarray) -> None:
        """Replace the whole bank with a fresh pass over the target set."""
        features_all = np.asarray(features_all)
        if features_all.shape != (self.num_samples, self.feature_dim):
            raise MemoryBankError(
                f'Expected ({self.num_samples}, {self.feature_dim}) '
                f'features, got {features_all.shape}.')
        _check_normalized(features_all, 'initialize')
        self.V = features_all.copy()
        logger.debug('Memory bank initialized with %d rows.',
                     self.num_samples)

    def _check_indices(self, indices: np.ndarray) -> None:
        if indices.size == 0:
            return
        if indices.min() < 0 or indices.max() >= self.num_samples:
            raise MemoryBankError(
                f'Bank indices must lie in [0, {self.num_samples}).')
        if np.unique(indices).size != indices.size:
            raise MemoryBankError('Bank indices in one batch must be '
                                  'distinct.')

    def _require_initialized(self) -> None:
        if self.V is None:
            raise MemoryBankError('Memory bank used before initialize().')

    def update_batch(self, indices: np.ndarray, features: np.ndarray) -> None:
        """Overwrite rows ``indices`` with ``features``; others untouched."""
        self._require_initialized()
        indices = np.asarray(indices, dtype=int).ravel()
        features = np.asarray(features)
        if features.shape != (indices.size, self.feature_dim):
            raise MemoryBankError(
                f'{indices.size} indices but features of shape '
                f'{features.shape}.')
        self._check_indices(indices)
        if indices.size == 0:
            return
        _check_normalized(features, 'update_batch')
        self.V[indices] = features

    def logits(self, indices: np.ndarray, features: np.ndarray) -> np.ndarray:
        """Scaled similarities v_r^T f_i / tau with the self column at -inf."""
        self._require_initialized()
        indices = np.asarray(indices, dtype=int).ravel()
        features = np.atleast_2d(np.asarray(features))
        if features.shape != (indices.size, self.feature_dim):
            raise MemoryBankError(
                f'{indices.size} indices but features of shape '
                f'{features.shape}.')
        if self.num_samples < 2:
            raise MemoryBankError('Neighbor similarities need N_t >= 2.')
        if indices.size and (indices.min() < 0
                             or indices.max() >= self.num_samples):
            raise MemoryBankError(
                f'Bank indices must lie in [0, {self.num_samples}).')
        scores = features @ self.V.T / self.tau
        scores[np.arange(indices.size), indices] = -np.inf
        return scores

    def similarities(self, indices: np.ndarray,
                     features: np.ndarray) -> np.ndarray:
        """Neighbor distributions of a batch, shape (B, N_t).

        Row b is the softmax of v_r^T f_b / tau over bank rows r != indices[b];
        the self column is exactly 0.
        """
        return softmax(self.logits(indices, features), axis=1)

    def similarity_row(self, i: int, f_i: np.ndarray) -> np.ndarray:
        """Neighbor distribution of one feature stored at bank index ``i``."""
        f_i = np.asarray(f_i)
        _check_normalized(f_i[None, :], 'similarity_row')
        return self.similarities(np.array([i]), f_i[None, :])[0]

    def snapshot(self) -> np.ndarray:
        self._require_initialized()
        return self.V.copy()
