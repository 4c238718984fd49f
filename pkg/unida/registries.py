from unida.registry import Registry

DUMPER_REGISTRY = Registry('dumper')
CONFIGURATOR_REGISTRY = Registry('configurator')
ACTIVATION_REGISTRY = Registry('activation')
SCENARIO_REGISTRY = Registry('scenario')
ABLATION_REGISTRY = Registry('ablation')
