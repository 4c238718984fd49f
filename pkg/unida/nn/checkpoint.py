"""Parameter checkpoint container.

A checkpoint is an uncompressed NumPy ``.npz`` archive (a zip of ``.npy``
arrays, readable without pickle) holding:

``header``
    0-d unicode array with a JSON object::

        {"format": "unida-checkpoint", "version": 1,
         "activation": "tanh", "num_classes": K, "feature_dim": d,
         "input_dim": D_in,
         "extractor_shapes": [[out, in], ...],
         "has_bank": false}

``extractor.W{l}`` / ``extractor.b{l}``
    Weight (out x in) and bias (out,) of dense layer ``l``.
``head.W`` / ``head.b``
    Composite classifier weight (2K x d) and bias (2K,).
``bank.V``
    Optional memory bank snapshot (N_t x d), for debugging only.

All arrays are stored row-major (C order) in the dtype they were trained in.
"""
import json
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np

from .params import ClassifierHeadParams, FeatureExtractorParams

CHECKPOINT_FORMAT = 'unida-checkpoint'
CHECKPOINT_VERSION = 1


def save_checkpoint(filename: Union[str, Path],
                    params: FeatureExtractorParams,
                    head: ClassifierHeadParams,
                    bank: Optional[np.ndarray] = None) -> None:
    """Write parameters (and optionally a bank snapshot) to ``filename``."""
    header = {
        'format': CHECKPOINT_FORMAT,
        'version': CHECKPOINT_VERSION,
        'activation': params.activation,
        'num_classes': head.num_classes,
        'feature_dim': head.feature_dim,
        'input_dim': params.input_dim,
        'extractor_shapes': [list(w.shape) for w in params.weights],
        'has_bank': bank is not None,
    }
    arrays = {'header': np.array(json.dumps(header, sort_keys=True))}
    for i, (w, b) in enumerate(zip(params.weights, params.biases)):
        arrays[f'extractor.W{i}'] = np.ascontiguousarray(w)
        arrays[f'extractor.b{i}'] = np.ascontiguousarray(b)
    arrays['head.W'] = np.ascontiguousarray(head.weight)
    arrays['head.b'] = np.ascontiguousarray(head.bias)
    if bank is not None:
        arrays['bank.V'] = np.ascontiguousarray(bank)

    filepath = Path(filename)
    filepath.parent.mkdir(parents=True, exist_ok=True)
    with open(filepath, 'wb') as f:
        np.savez(f, **arrays)


def load_checkpoint(
    filename: Union[str, Path]
) -> Tuple[FeatureExtractorParams, ClassifierHeadParams, Optional[np.ndarray]]:
    """Read a checkpoint written by ``save_checkpoint``.

    Returns:
        Tuple of extractor parameters, head parameters and the bank snapshot
        (None when the checkpoint has none).

    Raises:
        FileNotFoundError: If the file does not exist.
        ValueError: If the header is missing, of another format, or does not
            match the stored arrays.
    """
    filepath = Path(filename)
    if not filepath.exists():
        raise FileNotFoundError(f'File {filename} does not exist')

    with np.load(filepath, allow_pickle=False) as archive:
        if 'header' not in archive.files:
            raise ValueError(f'{filename} has no checkpoint header.')
        header = json.loads(str(archive['header']))
        if header.get('format') != CHECKPOINT_FORMAT:
            raise ValueError(f'{filename} is not a {CHECKPOINT_FORMAT} file.')
        if header.get('version') != CHECKPOINT_VERSION:
            raise ValueError(f'Unsupported checkpoint version '
                             f'{header.get("version")}.')
        depth = len(header['extractor_shapes'])
        weights = [archive[f'extractor.W{i}'] for i in range(depth)]
        biases = [archive[f'extractor.b{i}'] for i in range(depth)]
        head = ClassifierHeadParams(archive['head.W'], archive['head.b'])
        bank = archive['bank.V'] if header.get('has_bank') else None

    for i, (w, shape) in enumerate(zip(weights,
                                       header['extractor_shapes'])):
        if list(w.shape) != list(shape):
            raise ValueError(f'Layer {i} has shape {w.shape}, header says '
                             f'{shape}.')
    if head.num_classes != header['num_classes'] \
            or head.feature_dim != header['feature_dim']:
        raise ValueError('Head shape does not match the checkpoint header.')
    params = FeatureExtractorParams(weights, biases, header['activation'])
    return params, head, bank
