"""Runtime typing support for the public utrx API."""

from __future__ import annotations

from typing import Any

import numpy as np

from public import public
from typeguard import (
    CollectionCheckStrategy,
    ForwardRefPolicy,
)
from typeguard import (
    typechecked as _typechecked,
)
from typeguard._config import global_config

__all__ = ["typechecked"]


typechecked = _typechecked(
    forward_ref_policy=ForwardRefPolicy.IGNORE,
    collection_check_strategy=CollectionCheckStrategy.ALL_ITEMS,
)

# Override the default configuration
global_config.forward_ref_policy = ForwardRefPolicy.IGNORE
global_config.collection_check_strategy = CollectionCheckStrategy.ALL_ITEMS


@public
def as_float_array(value: Any, ndim: int = 1) -> np.ndarray:
    """
    Convert ``value`` to a float64 array with the given number of axes.

    The result is always a fresh copy so callers may mutate it freely.
    """
    array = np.array(value, dtype=np.float64, copy=True)
    if array.ndim != ndim:
        raise ValueError(
            f"expected an array with {ndim} axis(es), got shape {array.shape}"
        )
    return array
