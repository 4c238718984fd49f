from .dataset import DOMAINS, LabeledDataset, LabelSplit, ShiftSpec
from .io import dataset_header, read_dataset, write_dataset
from .presets import preset_split
from .synth import MEAN_LAYOUTS, class_means, generate, make_shift

__all__ = [
    'DOMAINS', 'LabeledDataset', 'LabelSplit', 'ShiftSpec', 'dataset_header',
    'read_dataset', 'write_dataset', 'preset_split', 'MEAN_LAYOUTS',
    'class_means', 'generate', 'make_shift'
]
