import logging
import sys
from typing import Optional

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def setup_logging(level: int = logging.INFO, quiet: bool = False) -> None:
    """Configure the ``unida`` logger hierarchy to write to stderr.

    Args:
        level (int): Logging level used when ``quiet`` is False.
        quiet (bool): If True, only warnings and errors are shown.
    """
    root = logging.getLogger('unida')
    root.setLevel(logging.WARNING if quiet else level)
    if not root.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        root.addHandler(handler)


def get_logger(name: Optional[str] = None) -> logging.Logger:
    """Return a logger below the ``unida`` hierarchy."""
    if name is None or name == 'unida' or name.startswith('unida.'):
        return logging.getLogger(name or 'unida')
    return logging.getLogger(f'unida.{name}')
