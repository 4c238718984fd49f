from pathlib import Path
from typing import Sequence, Union

import numpy as np
import pandas as pd

from .composite import DecisionBatch

# Header of the prediction dump; UNKNOWN is written as class index K.
PREDICTION_COLUMNS = ('sample_id', 'mc_argmax', 'p_minus_argmax',
                      'predicted_class')


def write_predictions(filename: Union[str, Path], sample_ids: Sequence[int],
                      decisions: DecisionBatch) -> None:
    """Write one row per target sample to a comma-delimited file.

    Args:
        filename (Union[str, Path]): Output path; parents are created.
        sample_ids (Sequence[int]): Dataset ids aligned with ``decisions``.
        decisions (DecisionBatch): Decisions of the target samples.
    """
    if len(sample_ids) != len(decisions):
        raise ValueError(f'{len(sample_ids)} sample ids for '
                         f'{len(decisions)} decisions.')
    frame = pd.DataFrame({
        'sample_id': np.asarray(sample_ids, dtype=int),
        'mc_argmax': decisions.mc_argmax.astype(int),
        'p_minus_argmax': decisions.paradox_score.astype(float),
        'predicted_class': decisions.predicted_class.astype(int),
    }, columns=list(PREDICTION_COLUMNS))
    filepath = Path(filename)
    filepath.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(filepath, index=False)


def read_predictions(filename: Union[str, Path]) -> pd.DataFrame:
    """Read a prediction dump, checking the header."""
    filepath = Path(filename)
    if not filepath.exists():
        raise FileNotFoundError(f'File {filename} does not exist')
    frame = pd.read_csv(filepath, float_precision='round_trip')
    if tuple(frame.columns) != PREDICTION_COLUMNS:
        raise ValueError(f'Unexpected prediction header {list(frame.columns)}'
                         f'; expected {list(PREDICTION_COLUMNS)}.')
    return frame
