from .base import BaseConfigurator, dump_config
from .configurator import (AutoConfigurator, JSONConfigurator,
                           PyConfigurator, YAMLConfigurator)
from .dumper import json_dumper, py_dumper, yaml_dumper
from .schema import (AblationSection, DataSection, EvaluateSection,
                     ExperimentConfig, LossSection, ModelSection,
                     ShiftSection, SplitSection, SweepSection,
                     SyntheticSection, TrainSection)

__all__ = [
    'BaseConfigurator', 'dump_config', 'AutoConfigurator',
    'JSONConfigurator', 'PyConfigurator', 'YAMLConfigurator', 'json_dumper',
    'py_dumper', 'yaml_dumper', 'AblationSection', 'DataSection',
    'EvaluateSection', 'ExperimentConfig', 'LossSection', 'ModelSection',
    'ShiftSection', 'SplitSection', 'SweepSection', 'SyntheticSection',
    'TrainSection'
]
