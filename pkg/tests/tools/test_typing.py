"""Test functions about typing."""

from __future__ import annotations

import numpy as np
import pytest

from typeguard import TypeCheckError

from utrx.tools.typing import as_float_array, typechecked


@typechecked
def _scale(value: float, times: int) -> float:
    return value * times


def test_typechecked() -> None:
    """Test that the decorator rejects wrong argument types."""
    assert _scale(1.5, 2) == 3.0
    with pytest.raises(TypeCheckError):
        _scale(1.5, "2")  # type: ignore[arg-type]


def test_as_float_array() -> None:
    """Test conversion, copy and shape checks of as_float_array."""
    source = np.array([1, 2, 3])
    array = as_float_array(source)
    assert array.dtype == np.float64
    array[0] = 10.0
    assert source[0] == 1
    assert as_float_array([[1, 0], [0, 1]], ndim=2).shape == (2, 2)
    with pytest.raises(ValueError):
        as_float_array([[1.0]])
    with pytest.raises(ValueError):
        as_float_array(1.0)
