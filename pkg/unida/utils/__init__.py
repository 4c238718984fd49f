from .exceptions import (ConfigError, DatasetFormatError,
                         DegenerateFeatureError, ForwardPassError,
                         MemoryBankError, MetricError, NumericalError,
                         UnidaError)
from .logger import get_logger, setup_logging
from .seeding import SEED_CONSUMERS, derive_seed, rng_for, split_seed

__all__ = [
    'ConfigError', 'DatasetFormatError', 'DegenerateFeatureError',
    'ForwardPassError', 'MemoryBankError', 'MetricError', 'NumericalError',
    'UnidaError', 'get_logger', 'setup_logging', 'SEED_CONSUMERS',
    'derive_seed', 'rng_for', 'split_seed'
]
