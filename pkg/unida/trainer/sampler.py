import numpy as np


class BatchSampler:
    """Shuffled mini-batches of dataset indices for one domain.

    Every epoch starts from a fresh permutation. Batches are contiguous
    slices of the permutation (the last may be shorter); once it is used up
    the sampler reshuffles and keeps going, so the smaller domain cycles.
    Indices within a batch are always distinct.

    Args:
        num_samples (int): Size of the domain.
        batch_size (int): Requested batch size, capped at ``num_samples``.
        rng (np.random.Generator): Shuffling stream.
    """

    def __init__(self, num_samples: int, batch_size: int,
                 rng: np.random.Generator) -> None:
        if num_samples < 1:
            raise ValueError('Cannot sample from an empty domain.')
        if batch_size < 1:
            raise ValueError(f'batch_size must be >= 1, got {batch_size}.')
        self.num_samples = num_samples
        self.batch_size = min(batch_size, num_samples)
        self.rng = rng
        self._order = np.empty(0, dtype=int)
        self._pos = 0

    def start_epoch(self) -> None:
        self._order = self.rng.permutation(self.num_samples)
        self._pos = 0

    def __iter__(self) -> 'BatchSampler':
        return self

    def __next__(self) -> np.ndarray:
        if self._pos >= self._order.size:
            self.start_epoch()
        batch = self._order[self._pos:self._pos + self.batch_size]
        self._pos += batch.size
        return batch
