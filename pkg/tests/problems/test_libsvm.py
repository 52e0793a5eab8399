"""Tests for the LIBSVM reader and writer."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from utrx.errors import DataError, ParseError
from utrx.problems import dump_libsvm, load_libsvm, synthetic_dataset


def test_dump_and_load(tmp_path: Path) -> None:
    """Test that a written dataset reads back unchanged."""
    data = synthetic_dataset(25, 5, seed=11)
    path = dump_libsvm(data, tmp_path / "data.libsvm")
    loaded = load_libsvm(path)
    assert loaded.N == 25
    assert loaded.n == 5
    assert np.allclose(
        loaded.features.toarray(), data.features.toarray(), atol=1e-12
    )
    assert np.array_equal(loaded.labels, data.labels)


def test_zero_one_labels(tmp_path: Path) -> None:
    """Test that {0, 1} labels are mapped to {-1, +1}."""
    path = tmp_path / "binary.svm"
    path.write_text("0 1:1.5\n1 2:2.0\n", encoding="utf-8")
    data = load_libsvm(path)
    assert np.array_equal(data.labels, np.array([-1.0, 1.0]))
    assert np.array_equal(
        data.features.toarray(), np.array([[1.5, 0.0], [0.0, 2.0]])
    )


def test_explicit_feature_count(tmp_path: Path) -> None:
    """Test that n_features widens the feature matrix."""
    path = tmp_path / "narrow.svm"
    path.write_text("+1 1:1\n-1 2:1\n", encoding="utf-8")
    assert load_libsvm(path, n_features=5).n == 5


@pytest.mark.parametrize(
    "content,line_number",
    [
        ("1 1:0.5\n-1 3:1.0 2:2.0\n", 2),
        ("abc 1:1\n", 1),
        ("1 1:0.5\n\n-1 0:1.0\n", 3),
        ("1 1:0.5 2\n", 1),
    ],
)
def test_malformed_lines(
    tmp_path: Path, content: str, line_number: int
) -> None:
    """Test that malformed lines report their line number."""
    path = tmp_path / "bad.svm"
    path.write_text(content, encoding="utf-8")
    with pytest.raises(ParseError) as excinfo:
        load_libsvm(path)
    assert excinfo.value.line_number == line_number
    assert f"{path}:{line_number}" in str(excinfo.value)


def test_empty_file(tmp_path: Path) -> None:
    """Test that an empty file is a data error."""
    path = tmp_path / "empty.svm"
    path.write_text("\n", encoding="utf-8")
    with pytest.raises(DataError):
        load_libsvm(path)


def test_multiclass_labels(tmp_path: Path) -> None:
    """Test that labels outside the binary sets are rejected."""
    path = tmp_path / "multi.svm"
    path.write_text("2 1:1\n3 1:2\n", encoding="utf-8")
    with pytest.raises(DataError):
        load_libsvm(path)
