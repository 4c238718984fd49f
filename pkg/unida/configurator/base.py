import os
from typing import Any, Dict, Optional, Type

from unida.registries import DUMPER_REGISTRY


class BaseConfigurator:
    """Nested key-value configuration loaded from a file.

    Keys are readable as attributes or as dict items; nested mappings become
    nested configurators. String values of the form ``env:NAME`` resolve to
    the environment variable ``NAME`` (None when unset).

    Examples:
        >>> config = BaseConfigurator({'seed': 3, 'train': {'epochs': 5}})
        >>> config.train.epochs
        5
        >>> config['seed']
        3
    """

    def __init__(self, config_dict: Optional[Dict[str, Any]] = None) -> None:
        if config_dict:
            self._load_from_dict(config_dict)

    @staticmethod
    def _resolve_env_vars(value: Any) -> Any:
        if isinstance(value, str) and value.startswith('env:'):
            return os.environ.get(value.split(':', 1)[1], None)
        return value

    def _load_from_dict(self, config_dict: Dict[str, Any]) -> None:
        for key, value in config_dict.items():
            value = self._resolve_env_vars(value)
            if isinstance(value, dict):
                value = BaseConfigurator(value)
            self.__dict__[key] = value

    def __getitem__(self, key: str) -> Any:
        return self.__dict__.get(key, None)

    def __setitem__(self, key: str, value: Any) -> None:
        self.__dict__[key] = value

    def __getattr__(self, key: str) -> Any:
        return self.__dict__.get(key, None)

    def __setattr__(self, key: str, value: Any) -> None:
        self.__dict__[key] = value

    def __contains__(self, key: str) -> bool:
        return key in self.__dict__

    @classmethod
    def fromfile(cls: Type['BaseConfigurator'],
                 filename: str) -> 'BaseConfigurator':
        """Create a configuration object from a file.

        Raises:
            NotImplementedError: Implemented by the format subclasses.
        """
        raise NotImplementedError

    def dumpfile(self, filename: str, format: str = 'yaml') -> None:
        """Write the configuration with the dumper registered for
        ``format``."""
        dump_config(self.to_dict(), filename, format)

    def merge(self, other_config: 'BaseConfigurator') -> None:
        """Merge ``other_config`` into this one; its values win.

        Nested configurators merge recursively, None values are skipped.
        """
        for key, value in other_config.__dict__.items():
            if value is None:
                continue
            mine = self.__dict__.get(key)
            if isinstance(mine, BaseConfigurator) and isinstance(
                    value, BaseConfigurator):
                mine.merge(value)
            else:
                self.__dict__[key] = value

    def to_dict(self) -> Dict[str, Any]:
        """Convert the configuration to plain nested dicts."""
        result = {}
        for key, value in self.__dict__.items():
            if isinstance(value, BaseConfigurator):
                result[key] = value.to_dict()
            else:
                result[key] = value
        return result


def dump_config(data: Dict[str, Any], filename: str,
                format: str = 'yaml') -> None:
    """Write ``data`` with the dumper registered under ``format``.

    Raises:
        ValueError: If no dumper is registered for ``format``.
    """
    if format not in DUMPER_REGISTRY:
        raise ValueError(f'Unsupported format: {format}; available: '
                         f'{", ".join(DUMPER_REGISTRY.names())}')
    DUMPER_REGISTRY.get(format)(data, filename)
