"""Typed experiment configuration.

A config file is a mapping with one section per module::

    seed: 0
    output_dir: runs/desk_unida
    data:
      synthetic:
        preset: desk_unida        # or split: {n_shared, n_source_private,
        shift:                    #            n_target_private}
          input_dim: 16
          samples_per_class: 50
          rotation_deg: 30.0
    model: {depth: 2, width: 64, feature_dim: 32, activation: tanh}
    train: {batch_size: 36, epochs: 30, tau: 0.05}
    loss: {alpha: 0.05, beta: 0.1, gamma: 0.05, margin: 0.4}
    ablation: {disable_esl: false, disable_sfc: false, disable_tova: false}
    sweep: {target_private: [5, 15, 25], repeats: 1}
    evaluate: {checkpoint: null}

Instead of ``synthetic`` the ``data`` section may name ``source_path`` and
``target_path`` of dataset files. Omitted keys take the defaults below;
unknown keys are errors.
"""
from dataclasses import asdict, dataclass, field, fields, is_dataclass
from typing import (Any, Dict, List, Mapping, Optional, Tuple, Union,
                    get_type_hints)

from unida.data.dataset import LabelSplit
from unida.data.presets import preset_split
from unida.data.synth import MEAN_LAYOUTS
from unida.losses.objective import LossWeights
from unida.registries import ABLATION_REGISTRY, ACTIVATION_REGISTRY
from unida.trainer.trainer import DTYPES, TrainConfig
from unida.utils.exceptions import ConfigError

from .base import BaseConfigurator
from .configurator import AutoConfigurator

DEFAULT_PRESET = 'desk_unida'


def _type_name(tp: Any) -> str:
    return getattr(tp, '__name__', str(tp).replace('typing.', ''))


def _coerce(value: Any, tp: Any, key: str) -> Any:
    """Check ``value`` against the annotation ``tp``; ints widen to float."""
    origin = getattr(tp, '__origin__', None)
    if origin is Union:
        options = tp.__args__
        if value is None and type(None) in options:
            return None
        options = [o for o in options if o is not type(None)]
        if len(options) == 1:
            return _coerce(value, options[0], key)
        for option in options:
            try:
                return _coerce(value, option, key)
            except ConfigError:
                pass
        raise ConfigError(f'{key}: expected {_type_name(tp)}, got '
                          f'{value!r}.')
    if origin in (list, List):
        if not isinstance(value, (list, tuple)):
            raise ConfigError(f'{key}: expected a list, got {value!r}.')
        (item_type, ) = tp.__args__
        return [
            _coerce(v, item_type, f'{key}[{i}]') for i, v in enumerate(value)
        ]
    if is_dataclass(tp):
        return _build(tp, value, key)
    if tp is bool:
        if not isinstance(value, bool):
            raise ConfigError(f'{key}: expected true/false, got {value!r}.')
        return value
    if tp is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f'{key}: expected an integer, got {value!r}.')
        return value
    if tp is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f'{key}: expected a number, got {value!r}.')
        return float(value)
    if tp is str:
        if not isinstance(value, str):
            raise ConfigError(f'{key}: expected a string, got {value!r}.')
        return value
    return value


def _build(cls: type, data: Any, prefix: str) -> Any:
    """Instantiate the section dataclass ``cls`` from ``data``.

    Raises:
        ConfigError: Naming the dotted key of an unknown entry, a missing
            required field or a value of the wrong type.
    """
    if isinstance(data, BaseConfigurator):
        data = data.to_dict()
    if data is None:
        data = {}
    if not isinstance(data, Mapping):
        raise ConfigError(f'{prefix or "config"}: expected a mapping, got '
                          f'{data!r}.')
    hints = get_type_hints(cls)
    names = {f.name for f in fields(cls) if f.init}
    for key in data:
        if key not in names:
            dotted = f'{prefix}.{key}' if prefix else str(key)
            raise ConfigError(f'Unknown config key {dotted}; expected one '
                              f'of {sorted(names)}.')
    kwargs = {}
    for f in fields(cls):
        if not f.init or f.name not in data:
            continue
        dotted = f'{prefix}.{f.name}' if prefix else f.name
        kwargs[f.name] = _coerce(data[f.name], hints[f.name], dotted)
    try:
        return cls(**kwargs)
    except TypeError as e:
        missing = [
            f.name for f in fields(cls) if f.init and f.name not in kwargs
        ]
        raise ConfigError(f'{prefix}: missing required field(s) '
                          f'{", ".join(f"{prefix}.{m}" for m in missing)}'
                          ) from e


@dataclass
class SplitSection:
    n_shared: int
    n_source_private: int
    n_target_private: int

    def __post_init__(self) -> None:
        try:
            self.to_split()
        except ValueError as e:
            raise ConfigError(f'data.synthetic.split: {e}') from e

    def to_split(self) -> LabelSplit:
        return LabelSplit(self.n_shared, self.n_source_private,
                          self.n_target_private)


@dataclass
class ShiftSection:
    input_dim: int = 16
    samples_per_class: int = 50
    radius: float = 10.0
    layout: str = 'sphere'
    covariance_scale: float = 1.0
    rotation_deg: float = 30.0
    translation: Union[float, List[float]] = 0.0

    def __post_init__(self) -> None:
        if self.layout not in MEAN_LAYOUTS:
            raise ConfigError(f'data.synthetic.shift.layout must be one of '
                              f'{MEAN_LAYOUTS}, got {self.layout!r}.')
        if self.input_dim < 2:
            raise ConfigError('data.synthetic.shift.input_dim must be >= 2.')
        if self.samples_per_class < 1:
            raise ConfigError(
                'data.synthetic.shift.samples_per_class must be >= 1.')
        if self.covariance_scale < 0:
            raise ConfigError(
                'data.synthetic.shift.covariance_scale must be >= 0.')
        if isinstance(self.translation, list) \
                and len(self.translation) != self.input_dim:
            raise ConfigError(f'data.synthetic.shift.translation must have '
                              f'{self.input_dim} entries.')


@dataclass
class SyntheticSection:
    """Either a registered ``preset`` or an explicit ``split``."""
    preset: Optional[str] = None
    split: Optional[SplitSection] = None
    shift: ShiftSection = field(default_factory=ShiftSection)

    def __post_init__(self) -> None:
        if self.preset is not None and self.split is not None:
            raise ConfigError('data.synthetic: give either preset or split, '
                              'not both.')
        if self.preset is None and self.split is None:
            self.preset = DEFAULT_PRESET
        if self.preset is not None:
            try:
                preset_split(self.preset)
            except KeyError as e:
                raise ConfigError(f'data.synthetic.preset: {e}') from e

    def label_split(self) -> LabelSplit:
        if self.split is not None:
            return self.split.to_split()
        return preset_split(self.preset)


@dataclass
class DataSection:
    """Exactly one of the dataset file pair or ``synthetic``."""
    source_path: Optional[str] = None
    target_path: Optional[str] = None
    synthetic: Optional[SyntheticSection] = None

    def __post_init__(self) -> None:
        has_paths = self.source_path is not None \
            or self.target_path is not None
        if has_paths and self.synthetic is not None:
            raise ConfigError('data: give either source_path/target_path or '
                              'synthetic, not both.')
        if not has_paths and self.synthetic is None:
            raise ConfigError('data: one of source_path/target_path or '
                              'synthetic is required.')
        if has_paths and (self.source_path is None
                          or self.target_path is None):
            raise ConfigError('data: source_path and target_path must be '
                              'given together.')

    @property
    def is_synthetic(self) -> bool:
        return self.synthetic is not None


def _default_data() -> DataSection:
    return DataSection(synthetic=SyntheticSection())


@dataclass
class ModelSection:
    depth: int = 2
    width: int = 64
    feature_dim: int = 32
    activation: str = 'tanh'
    init_checkpoint: Optional[str] = None

    def __post_init__(self) -> None:
        if self.activation not in ACTIVATION_REGISTRY:
            raise ConfigError(f'model.activation must be one of '
                              f'{ACTIVATION_REGISTRY.names()}, got '
                              f'{self.activation!r}.')
        for name in ('depth', 'width', 'feature_dim'):
            if getattr(self, name) < 1:
                raise ConfigError(f'model.{name} must be >= 1.')


@dataclass
class TrainSection:
    batch_size: int = 36
    epochs: int = 30
    tau: float = 0.05
    lr_head: float = 0.02
    lr_extractor: float = 0.002
    momentum: float = 0.9
    weight_decay: float = 0.0005
    schedule_a: float = 10.0
    schedule_b: float = 0.75
    iterations_per_epoch: Optional[int] = None
    dtype: str = 'float64'

    def __post_init__(self) -> None:
        if self.dtype not in DTYPES:
            raise ConfigError(f'train.dtype must be one of {list(DTYPES)}.')
        if self.tau <= 0:
            raise ConfigError('train.tau must be positive.')


@dataclass
class LossSection:
    alpha: float = 0.05
    beta: float = 0.1
    gamma: float = 0.05
    margin: float = 0.4

    def to_weights(self) -> LossWeights:
        try:
            return LossWeights(self.alpha, self.beta, self.gamma,
                               self.margin)
        except ValueError as e:
            raise ConfigError(f'loss: {e}') from e

    def __post_init__(self) -> None:
        self.to_weights()


@dataclass
class AblationSection:
    """Terms switched off by ``train``; variants run by ``ablate``."""
    disable_esl: bool = False
    disable_sfc: bool = False
    disable_tova: bool = False
    variants: Optional[List[str]] = None

    def __post_init__(self) -> None:
        for name in self.variants or []:
            if name not in ABLATION_REGISTRY:
                raise ConfigError(f'ablation.variants: unknown variant '
                                  f'{name!r}; available: '
                                  f'{ABLATION_REGISTRY.names()}.')

    def disabled(self) -> Tuple[str, ...]:
        flags = (('esl', self.disable_esl), ('sfc', self.disable_sfc),
                 ('tova', self.disable_tova))
        return tuple(name for name, off in flags if off)

    def variant_names(self) -> List[str]:
        return list(self.variants) if self.variants else \
            ABLATION_REGISTRY.names()


@dataclass
class SweepSection:
    target_private: List[int] = field(default_factory=lambda: [5, 15, 25])
    repeats: int = 1
    baseline: bool = False
    jobs: int = 1

    def __post_init__(self) -> None:
        if not self.target_private:
            raise ConfigError('sweep.target_private must not be empty.')
        if any(n < 0 for n in self.target_private):
            raise ConfigError('sweep.target_private entries must be >= 0.')
        if self.repeats < 1:
            raise ConfigError('sweep.repeats must be >= 1.')
        if self.jobs < 1:
            raise ConfigError('sweep.jobs must be >= 1.')


@dataclass
class EvaluateSection:
    checkpoint: Optional[str] = None


@dataclass
class ExperimentConfig:
    seed: int = 0
    output_dir: str = 'runs/default'
    data: DataSection = field(default_factory=_default_data)
    model: ModelSection = field(default_factory=ModelSection)
    train: TrainSection = field(default_factory=TrainSection)
    loss: LossSection = field(default_factory=LossSection)
    ablation: AblationSection = field(default_factory=AblationSection)
    sweep: SweepSection = field(default_factory=SweepSection)
    evaluate: EvaluateSection = field(default_factory=EvaluateSection)

    @classmethod
    def from_dict(cls, data: Union[Mapping[str, Any], BaseConfigurator,
                                   None]) -> 'ExperimentConfig':
        """Validate a loaded mapping.

        Raises:
            ConfigError: On unknown keys, missing required fields, wrong
                types or out-of-range values.
        """
        return _build(cls, data, '')

    @classmethod
    def fromfile(cls, filename: str) -> 'ExperimentConfig':
        """Load any format ``AutoConfigurator`` reads and validate it."""
        return cls.from_dict(AutoConfigurator.fromfile(filename))

    def to_dict(self) -> Dict[str, Any]:
        """The effective config with all defaults filled in."""
        return asdict(self)

    def to_train_config(self,
                        seed: Optional[int] = None,
                        disabled: Optional[Tuple[str, ...]] = None
                        ) -> TrainConfig:
        """TrainConfig of this experiment.

        Args:
            seed (Optional[int]): Overrides ``self.seed``.
            disabled (Optional[Tuple[str, ...]]): Overrides the ablation
                flags.
        """
        t, m = self.train, self.model
        return TrainConfig(
            batch_size=t.batch_size,
            epochs=t.epochs,
            weights=self.loss.to_weights(),
            tau=t.tau,
            lr_head=t.lr_head,
            lr_extractor=t.lr_extractor,
            momentum=t.momentum,
            weight_decay=t.weight_decay,
            schedule_a=t.schedule_a,
            schedule_b=t.schedule_b,
            seed=self.seed if seed is None else seed,
            iterations_per_epoch=t.iterations_per_epoch,
            dtype=t.dtype,
            disabled=self.ablation.disabled()
            if disabled is None else tuple(disabled),
            depth=m.depth,
            width=m.width,
            feature_dim=m.feature_dim,
            activation=m.activation)
