from .losses import (ce_grad, entropy, esl_grad, hardest_negatives, loss_ce,
                     loss_esl, loss_sfc, loss_sova, loss_tova, sfc_grad,
                     sova_grad, tova_grad)
from .log import LOSS_LOG_COLUMNS, read_loss_log, write_loss_log
from .objective import (TARGET_TERMS, FrozenSelections, LossReport,
                        LossWeights, ObjectiveGradients, compute_objective,
                        loss_total)

__all__ = [
    'ce_grad', 'entropy', 'esl_grad', 'hardest_negatives', 'loss_ce',
    'loss_esl', 'loss_sfc', 'loss_sova', 'loss_tova', 'sfc_grad', 'sova_grad',
    'tova_grad', 'LOSS_LOG_COLUMNS', 'read_loss_log', 'write_loss_log',
    'TARGET_TERMS', 'FrozenSelections', 'LossReport',
    'LossWeights', 'ObjectiveGradients', 'compute_objective', 'loss_total'
]
