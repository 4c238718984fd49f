from typing import Dict

import numpy as np

SEED_CONSUMERS = ('data', 'init', 'shuffle')


def split_seed(seed: int) -> Dict[str, np.random.SeedSequence]:
    """Split one root seed into independent streams, one per consumer.

    The split is deterministic, so the data, the parameter initialization
    and the batch shuffling can each be reproduced on their own.

    Args:
        seed (int): The root seed of a run.

    Returns:
        Dict[str, np.random.SeedSequence]: A child sequence for each name in
            ``SEED_CONSUMERS``.
    """
    children = np.random.SeedSequence(seed).spawn(len(SEED_CONSUMERS))
    return dict(zip(SEED_CONSUMERS, children))


def rng_for(seed: int, consumer: str) -> np.random.Generator:
    """Generator for one consumer of the root seed."""
    if consumer not in SEED_CONSUMERS:
        raise KeyError(f'Unknown seed consumer {consumer}; '
                       f'expected one of {SEED_CONSUMERS}.')
    return np.random.default_rng(split_seed(seed)[consumer])


def derive_seed(seed: int, consumer: str) -> int:
    """Plain integer seed of one consumer, for APIs that take an int."""
    if consumer not in SEED_CONSUMERS:
        raise KeyError(f'Unknown seed consumer {consumer}; '
                       f'expected one of {SEED_CONSUMERS}.')
    return int(split_seed(seed)[consumer].generate_state(1)[0])
