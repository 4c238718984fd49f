"""Flat text format of a dataset.

One header line ``id,domain,label,f0,...,f{D-1}`` followed by one row per
sample. Floats are written with ``repr`` (shortest round-trip form), so a
write-read-write cycle reproduces the file byte for byte. Target files keep
their labels; ``read_dataset(..., mask_labels=True)`` drops them for
training.
"""
import csv
from pathlib import Path
from typing import List, Union

import numpy as np

from unida.utils.exceptions import DatasetFormatError

from .dataset import DOMAINS, LabeledDataset

FIXED_COLUMNS = ['id', 'domain', 'label']


def dataset_header(input_dim: int) -> List[str]:
    return FIXED_COLUMNS + [f'f{j}' for j in range(input_dim)]


def write_dataset(ds: LabeledDataset, filename: Union[str, Path]) -> None:
    """Write ``ds`` to ``filename``; parent directories are created."""
    if ds.labels is None:
        raise ValueError('Only labeled datasets can be written.')
    filepath = Path(filename)
    filepath.parent.mkdir(parents=True, exist_ok=True)
    with open(filepath, 'w', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(dataset_header(ds.input_dim))
        for sample_id, label, row in zip(ds.ids, ds.labels, ds.features):
            writer.writerow([int(sample_id), ds.domain,
                             int(label)] + [repr(float(x)) for x in row])


def read_dataset(filename: Union[str, Path],
                 mask_labels: bool = False) -> LabeledDataset:
    """Parse a dataset file.

    Args:
        filename (Union[str, Path]): File written by ``write_dataset``.
        mask_labels (bool): If True, target labels are dropped from the
            returned dataset.

    Returns:
        LabeledDataset

    Raises:
        FileNotFoundError: If the file does not exist.
        DatasetFormatError: On a malformed header, a row with the wrong
            number of fields, a non-numeric field or mixed domains; the
            error carries the 1-based line number.
    """
    filepath = Path(filename)
    if not filepath.exists():
        raise FileNotFoundError(f'File {filename} does not exist')

    with open(filepath, 'r', newline='') as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None:
            raise DatasetFormatError('empty file, expected a header', line=1)
        input_dim = len(header) - len(FIXED_COLUMNS)
        if input_dim < 1 or header != dataset_header(input_dim):
            raise DatasetFormatError(
                'header must be id,domain,label,f0,...,f{D-1}', line=1)

        ids, labels, rows, domains = [], [], [], set()
        for line, record in enumerate(reader, start=2):
            if not record:
                continue
            if len(record) != len(header):
                raise DatasetFormatError(
                    f'expected {len(header)} fields, found {len(record)}',
                    line=line)
            if record[1] not in DOMAINS:
                raise DatasetFormatError(f'unknown domain {record[1]!r}',
                                         line=line)
            domains.add(record[1])
            try:
                ids.append(int(record[0]))
                labels.append(int(record[2]))
                rows.append([float(x) for x in record[3:]])
            except ValueError as e:
                raise DatasetFormatError(f'non-numeric field ({e})',
                                         line=line) from e

    if not rows:
        raise DatasetFormatError('no samples after the header', line=2)
    if len(domains) != 1:
        raise DatasetFormatError(f'mixed domains {sorted(domains)}')
    domain = domains.pop()
    features = np.asarray(rows, dtype=float)
    if not np.all(np.isfinite(features)):
        raise DatasetFormatError('non-finite feature value')

    ds = LabeledDataset(features, np.asarray(labels), domain,
                        np.asarray(ids))
    if mask_labels and domain == 'target':
        return ds.without_labels()
    return ds
