from typing import Any, Callable, Dict, Iterator, List, Optional, TypeVar

T = TypeVar('T')


class Registry:
    """A registry mapping names to classes, functions or plain values.

    Hidden activations, label-set presets, ablation variants, config loaders
    and dumpers are all looked up by name through instances of this class,
    so config files can refer to them as strings.

    Args:
        category (str): The name of the registry (e.g., 'activation',
            'scenario') used in error messages.
    """

    def __init__(self, category: str) -> None:
        self._category = category
        self._modules: Dict[str, Any] = {}

    def register(self, name: Optional[str] = None) -> Callable[[T], T]:
        """Register an object under a given name.

        Used as a decorator on classes and functions; values that cannot be
        decorated are registered with ``registry.add``.

        Args:
            name (Optional[str]): The name to register the object under.
                If None, use the ``__name__`` of the object.

        Returns:
            Callable[[T], T]: A decorator returning the object unchanged.

        Examples:
            >>> @ACTIVATION_REGISTRY.register('tanh')
            ... class Tanh:
            ...     pass
        """

        def _register(module: T) -> T:
            _name = name if name is not None else module.__name__
            self.add(_name, module)
            return module

        return _register

    def add(self, name: str, module: Any) -> None:
        """Register ``module`` under ``name``.

        Raises:
            ValueError: If the name is already taken in this registry.
        """
        if name in self._modules:
            raise ValueError(
                f'Module {name} already registered in {self._category}.')
        self._modules[name] = module

    def get(self, name: str) -> Any:
        """Retrieve an object by its registered name.

        Raises:
            KeyError: If the name is not registered; the message lists the
                available names.
        """
        if name not in self._modules:
            raise KeyError(f'Module {name} not found in {self._category}; '
                           f'available: {", ".join(self.names())}.')
        return self._modules[name]

    def names(self) -> List[str]:
        """Registered names in registration order."""
        return list(self._modules)

    def __contains__(self, name: str) -> bool:
        return name in self._modules

    def __iter__(self) -> Iterator[str]:
        return iter(self._modules)

    def __len__(self) -> int:
        return len(self._modules)

    def __repr__(self) -> str:
        return f'{self._category}: ' + ', '.join(self._modules.keys())
