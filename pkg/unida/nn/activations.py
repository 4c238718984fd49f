import numpy as np

from unida.registries import ACTIVATION_REGISTRY


class Activation:
    """An elementwise hidden nonlinearity and its derivative."""

    @staticmethod
    def forward(x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @staticmethod
    def derivative(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Derivative at pre-activation ``x`` whose output is ``y``."""
        raise NotImplementedError


@ACTIVATION_REGISTRY.register('tanh')
class Tanh(Activation):
    """Default hidden activation; smooth, so finite differences are exact
    up to truncation error."""

    @staticmethod
    def forward(x: np.ndarray) -> np.ndarray:
        return np.tanh(x)

    @staticmethod
    def derivative(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return 1.0 - y * y


@ACTIVATION_REGISTRY.register('relu')
class ReLU(Activation):

    @staticmethod
    def forward(x: np.ndarray) -> np.ndarray:
        return np.maximum(x, 0.0)

    @staticmethod
    def derivative(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return (x > 0).astype(x.dtype)
