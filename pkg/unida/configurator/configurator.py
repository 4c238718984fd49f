import importlib.util
import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import yaml

from unida.registries import CONFIGURATOR_REGISTRY
from unida.utils.exceptions import ConfigError

from .base import BaseConfigurator


def _existing(filename: str) -> Path:
    filepath = Path(filename).resolve()
    if not filepath.exists():
        raise FileNotFoundError(f'File {filename} does not exist')
    return filepath


def _top_level_mapping(data: Any, filename: str) -> Dict[str, Any]:
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f'{filename}: the top level must be a mapping, '
                          f'got {type(data).__name__}.')
    return data


@CONFIGURATOR_REGISTRY.register('json')
class JSONConfigurator(BaseConfigurator):
    """Configuration read from a JSON file.

    Example:
        config = JSONConfigurator.fromfile('desk_unida.json')
        print(config.train.epochs)
    """

    @classmethod
    def fromfile(cls, filename: str) -> 'JSONConfigurator':
        with open(_existing(filename), 'r') as f:
            try:
                data = json.load(f)
            except json.JSONDecodeError as e:
                raise ConfigError(f'{filename}: {e}') from e
        return cls(_top_level_mapping(data, filename))


@CONFIGURATOR_REGISTRY.register('yaml')
class YAMLConfigurator(BaseConfigurator):
    """Configuration read from a YAML file.

    Example:
        config = YAMLConfigurator.fromfile('desk_unida.yaml')
        print(config.train.epochs)
    """

    @classmethod
    def fromfile(cls, filename: str) -> 'YAMLConfigurator':
        with open(_existing(filename), 'r') as f:
            try:
                data = yaml.safe_load(f)
            except yaml.YAMLError as e:
                raise ConfigError(f'{filename}: {e}') from e
        return cls(_top_level_mapping(data, filename))


CONFIGURATOR_REGISTRY.add('yml', YAMLConfigurator)


@CONFIGURATOR_REGISTRY.register('py')
class PyConfigurator(BaseConfigurator):
    """Configuration read from a Python file.

    Every public module-level name becomes a key. A module may list parent
    files in ``_base_`` (a path or a list of paths, relative to the file);
    parents are merged first and the file's own values win.

    Example:
        config = PyConfigurator.fromfile('sweep.py')
        print(config.sweep.target_private)
    """

    @classmethod
    def fromfile(cls, filename: str) -> 'PyConfigurator':
        config_dict, base_files = cls._load_python_config(filename)
        config = cls()
        for base_file in base_files:
            if base_file is None:
                raise ConfigError(f'{filename}: invalid _base_ entry None')
            base_path = Path(base_file)
            if not base_path.is_absolute():
                base_path = Path(filename).resolve().parent / base_path
            config.merge(AutoConfigurator.fromfile(str(base_path)))
        config.merge(cls(config_dict))
        return config

    @staticmethod
    def _load_python_config(
            filename: str) -> Tuple[Dict[str, Any], List[Optional[str]]]:
        filepath = _existing(filename)
        spec = importlib.util.spec_from_file_location(filepath.stem, filepath)
        module = importlib.util.module_from_spec(spec)
        spec.loader.exec_module(module)

        base_files = getattr(module, '_base_', None) or []
        if not isinstance(base_files, (list, tuple)):
            base_files = [base_files]
        config_dict = {
            name: getattr(module, name)
            for name in dir(module) if not name.startswith('_')
            and not callable(getattr(module, name))
            and not isinstance(getattr(module, name), type(importlib))
        }
        return config_dict, list(base_files)


class AutoConfigurator(BaseConfigurator):
    """Pick the configurator registered for the file suffix."""

    @classmethod
    def fromfile(cls, filename: str) -> BaseConfigurator:
        """Load ``filename`` with the configurator matching its suffix.

        Raises:
            ConfigError: If no configurator handles the suffix.
            FileNotFoundError: If the file does not exist.
        """
        file_extension = Path(filename).suffix[1:]
        if file_extension not in CONFIGURATOR_REGISTRY:
            raise ConfigError(
                f"Unsupported file extension '{file_extension}'; expected "
                f'one of {", ".join(CONFIGURATOR_REGISTRY.names())}')
        return CONFIGURATOR_REGISTRY.get(file_extension).fromfile(filename)
