from unida.registries import SCENARIO_REGISTRY

from .dataset import LabelSplit

# Label-set divisions of the standard benchmarks:
# (|Ls∩Lt|, |Ls-Lt|, |Lt-Ls|).
SCENARIO_REGISTRY.add('office31_osda', LabelSplit(10, 0, 11))
SCENARIO_REGISTRY.add('officehome_osda', LabelSplit(25, 0, 40))
SCENARIO_REGISTRY.add('visda_osda', LabelSplit(6, 0, 6))
SCENARIO_REGISTRY.add('office31_unida', LabelSplit(10, 10, 11))
SCENARIO_REGISTRY.add('officehome_unida', LabelSplit(10, 5, 50))
SCENARIO_REGISTRY.add('visda_unida', LabelSplit(6, 3, 3))
SCENARIO_REGISTRY.add('domainnet_unida', LabelSplit(150, 50, 145))
# Desk-scale default.
SCENARIO_REGISTRY.add('desk_unida', LabelSplit(10, 5, 5))


def preset_split(name: str) -> LabelSplit:
    """LabelSplit registered under ``name``."""
    return SCENARIO_REGISTRY.get(name)
