from typing import Optional


class UnidaError(Exception):
    """Base class of every error raised on purpose by unida."""


class ConfigError(UnidaError, ValueError):
    """An experiment config failed validation."""


class DatasetFormatError(UnidaError, ValueError):
    """A dataset file could not be parsed.

    Args:
        message (str): What is wrong with the file.
        line (Optional[int]): 1-based line number of the offending row.
    """

    def __init__(self, message: str, line: Optional[int] = None) -> None:
        self.line = line
        if line is not None:
            message = f'line {line}: {message}'
        super().__init__(message)


class DegenerateFeatureError(UnidaError, ArithmeticError):
    """A feature vector had zero norm before l2 normalization."""


class ForwardPassError(UnidaError, RuntimeError):
    """Backward was requested without a matching forward pass."""


class NumericalError(UnidaError, ArithmeticError):
    """A loss or parameter became non-finite, or a gradient check failed."""


class MemoryBankError(UnidaError, ValueError):
    """Invalid memory bank access or content."""


class MetricError(UnidaError, ValueError):
    """Inputs to an open-set metric are unusable."""
