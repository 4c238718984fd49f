from pathlib import Path
from typing import Dict, List, Sequence, Union

import pandas as pd

LOSS_LOG_COLUMNS = ('epoch', 'iteration', 'ce', 'sova', 'esl', 'sfc', 'tova',
                    'total')


def write_loss_log(records: Sequence[Dict[str, float]],
                   filename: Union[str, Path]) -> None:
    """Write one row per iteration with every LossReport field."""
    frame = pd.DataFrame(list(records), columns=list(LOSS_LOG_COLUMNS))
    filepath = Path(filename)
    filepath.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(filepath, index=False)


def read_loss_log(filename: Union[str, Path]) -> List[Dict[str, float]]:
    frame = pd.read_csv(filename, float_precision='round_trip')
    if tuple(frame.columns) != LOSS_LOG_COLUMNS:
        raise ValueError(f'Unexpected loss log header {list(frame.columns)}.')
    return frame.to_dict(orient='records')
