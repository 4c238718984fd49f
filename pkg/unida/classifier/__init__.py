from .composite import (Decision, DecisionBatch, ESLBranch, ProbabilityBatch,
                        ProbabilityBundle, bundle_from_logits,
                        bundles_from_logits, decide, decide_batch, esl_branch,
                        esl_branches)
from .predictions import (PREDICTION_COLUMNS, read_predictions,
                          write_predictions)

__all__ = [
    'Decision', 'DecisionBatch', 'ESLBranch', 'ProbabilityBatch',
    'ProbabilityBundle', 'bundle_from_logits', 'bundles_from_logits',
    'decide', 'decide_batch', 'esl_branch', 'esl_branches',
    'PREDICTION_COLUMNS', 'read_predictions', 'write_predictions'
]
