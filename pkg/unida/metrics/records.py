import json
from pathlib import Path
from typing import Dict, List, Sequence, Union

import pandas as pd

from .open_set import METRIC_FIELDS, MetricsReport

METRICS_CSV = 'metrics.csv'
METRICS_JSONL = 'metrics.jsonl'


def metrics_frame(history: Sequence[MetricsReport]) -> pd.DataFrame:
    """One row per epoch, columns ``epoch`` and the MetricsReport fields."""
    rows = [{'epoch': epoch, **report.to_dict()}
            for epoch, report in enumerate(history, start=1)]
    return pd.DataFrame(rows, columns=['epoch', *METRIC_FIELDS])


def write_metrics(history: Sequence[MetricsReport],
                  out_dir: Union[str, Path]) -> Dict[str, Path]:
    """Write the per-epoch records as delimited text and JSON lines.

    Returns:
        Dict[str, Path]: Paths of the ``csv`` and ``jsonl`` files.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    frame = metrics_frame(history)
    csv_path, jsonl_path = out / METRICS_CSV, out / METRICS_JSONL
    frame.to_csv(csv_path, index=False)
    with open(jsonl_path, 'w') as f:
        for record in frame.to_dict(orient='records'):
            f.write(json.dumps(record) + '\n')
    return {'csv': csv_path, 'jsonl': jsonl_path}


def read_metrics(filename: Union[str, Path]) -> List[MetricsReport]:
    """Reports from a ``metrics.jsonl`` file, in epoch order."""
    reports = []
    with open(filename, 'r') as f:
        for line in f:
            if line.strip():
                record = json.loads(line)
                reports.append(
                    MetricsReport(**{k: record[k]
                                     for k in METRIC_FIELDS}))
    return reports
