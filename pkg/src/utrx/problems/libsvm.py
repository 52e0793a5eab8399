"""LIBSVM text format reader and writer."""

from __future__ import annotations

import logging

from pathlib import Path
from typing import Optional, Union

import numpy as np

from public import public
from sklearn.datasets import dump_svmlight_file, load_svmlight_file

from utrx.errors import DataError, ParseError
from utrx.problems.logistic import Dataset
from utrx.tools.typing import typechecked

logger = logging.getLogger(__name__)


def _locate_malformed_line(path: Path) -> Optional[ParseError]:
    """Scan ``path`` and describe its first line that breaks the format."""
    with path.open("r", encoding="utf-8") as handle:
        for line_number, raw in enumerate(handle, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tokens = line.split()
            try:
                float(tokens[0])
            except ValueError:
                return ParseError(
                    f"invalid label {tokens[0]!r}", path, line_number
                )
            previous = 0
            for token in tokens[1:]:
                if token.startswith("qid:"):
                    continue
                index_text, sep, value_text = token.partition(":")
                try:
                    index = int(index_text)
                    float(value_text)
                except ValueError:
                    index = -1
                if not sep or index < 1:
                    return ParseError(
                        f"invalid feature token {token!r}", path, line_number
                    )
                if index <= previous:
                    return ParseError(
                        "feature indices must be strictly increasing",
                        path,
                        line_number,
                    )
                previous = index
    return None


@public
@typechecked
def load_libsvm(
    path: Union[str, Path], n_features: Optional[int] = None
) -> Dataset:
    """
    Read a LIBSVM file into a Dataset.

    Parameters
    ----------
    path : str or Path
        File with lines ``label idx:val idx:val ...`` and 1-based,
        strictly increasing indices.
    n_features : int, optional
        Explicit feature count; defaults to the largest index in the file.

    Raises
    ------
    ParseError
        A line is malformed; the message carries its line number.
    DataError
        The file is empty, an index exceeds ``n_features`` or the labels
        are not binary.
    """
    path = Path(path)
    if not path.read_text(encoding="utf-8").strip():
        raise DataError(f"{path}: empty LIBSVM file")
    error = _locate_malformed_line(path)
    if error is not None:
        raise error
    try:
        features, raw_labels = load_svmlight_file(
            str(path),
            n_features=n_features,
            dtype=np.float64,
            zero_based=False,
        )
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from exc

    raw_labels = np.asarray(raw_labels, dtype=np.float64)
    values = set(np.unique(raw_labels).tolist())
    if values <= {0.0, 1.0}:
        labels = np.where(raw_labels > 0, 1.0, -1.0)
    elif values <= {-1.0, 1.0}:
        labels = raw_labels
    else:
        raise DataError(
            f"{path}: labels must be in {{0, 1}} or {{-1, +1}}, "
            f"found {sorted(values)[:5]}"
        )
    features.sort_indices()
    logger.info(
        "loaded %s: N=%d, n=%d, nnz=%d",
        path,
        features.shape[0],
        features.shape[1],
        features.nnz,
    )
    return Dataset(features, labels)


@public
@typechecked
def dump_libsvm(data: Dataset, path: Union[str, Path]) -> Path:
    """Write ``data`` in LIBSVM format with 1-based indices."""
    path = Path(path)
    features = data.features.copy()
    features.sort_indices()
    dump_svmlight_file(
        features,
        data.labels.astype(np.int64),
        str(path),
        zero_based=False,
    )
    return path
