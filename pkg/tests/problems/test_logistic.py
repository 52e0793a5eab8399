"""Tests for the logistic-regression oracle."""

from __future__ import annotations

import numpy as np
import pytest
import scipy.sparse as sp

from utrx.errors import ConfigurationError, DataError
from utrx.problems import Dataset, logistic_oracle, synthetic_dataset


def test_value_and_gradient_at_zero() -> None:
    """Test the closed forms at the origin."""
    data = synthetic_dataset(50, 6, seed=1)
    oracle = logistic_oracle(data)
    x = np.zeros(6)
    assert oracle.value(x) == pytest.approx(np.log(2.0), rel=1e-14)
    expected = -0.5 * (data.features.T @ data.labels) / data.N
    assert np.allclose(oracle.gradient(x), expected, atol=1e-14)


def test_hessian_is_positive_semidefinite() -> None:
    """Test symmetry and semidefiniteness of the Hessian."""
    data = synthetic_dataset(40, 5, seed=2)
    oracle = logistic_oracle(data, gamma=0.0)
    hess = oracle.hessian(np.full(5, 0.3))
    assert np.array_equal(hess, hess.T)
    assert np.linalg.eigvalsh(hess)[0] >= -1e-12


def test_large_margins_stay_finite() -> None:
    """Test that far-away points do not overflow."""
    oracle = logistic_oracle(synthetic_dataset(20, 3, seed=3))
    x = np.full(3, 1e3)
    assert np.isfinite(oracle.value(x))
    assert np.all(np.isfinite(oracle.gradient(x)))


def test_lipschitz_hint_of_unit_rows() -> None:
    """Test the Hessian Lipschitz bound on rows of unit norm."""
    data = Dataset(sp.identity(3, format="csr"), np.array([1.0, -1.0, 1.0]))
    hint = logistic_oracle(data).lipschitz_hint()
    assert hint == pytest.approx(1.0 / (6.0 * np.sqrt(3.0)))


def test_synthetic_dataset_is_reproducible() -> None:
    """Test that a seed fixes the sampled data."""
    first = synthetic_dataset(30, 4, seed=5)
    second = synthetic_dataset(30, 4, seed=5)
    assert np.array_equal(first.features.toarray(), second.features.toarray())
    assert np.array_equal(first.labels, second.labels)
    assert set(np.unique(first.labels)) <= {-1.0, 1.0}


def test_dataset_validation() -> None:
    """Test the label and shape checks of a dataset."""
    with pytest.raises(DataError):
        Dataset(sp.identity(2, format="csr"), np.array([1.0, 0.0]))
    with pytest.raises(DataError):
        Dataset(sp.identity(2, format="csr"), np.array([1.0, -1.0, 1.0]))


def test_negative_gamma() -> None:
    """Test that a negative regularization weight is rejected."""
    with pytest.raises(ConfigurationError):
        logistic_oracle(synthetic_dataset(10, 2), gamma=-1.0)
