from unida.registries import ABLATION_REGISTRY

# Loss ablations: row label -> target terms switched off.
ABLATION_REGISTRY.add('ALL', ())
ABLATION_REGISTRY.add('w/o L_ESL', ('esl', ))
ABLATION_REGISTRY.add('w/o L_SFC', ('sfc', ))
ABLATION_REGISTRY.add('w/o L_TOVA', ('tova', ))
ABLATION_REGISTRY.add('w/o L_ESL+L_SFC+L_TOVA', ('esl', 'sfc', 'tova'))

SOURCE_ONLY = 'w/o L_ESL+L_SFC+L_TOVA'
