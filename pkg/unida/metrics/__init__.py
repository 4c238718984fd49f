from .open_set import (METRIC_FIELDS, MetricsReport, auroc, evaluate,
                       format_report, hos)
from .records import metrics_frame, read_metrics, write_metrics

__all__ = [
    'METRIC_FIELDS', 'MetricsReport', 'auroc', 'evaluate', 'format_report',
    'hos', 'metrics_frame', 'read_metrics', 'write_metrics'
]
