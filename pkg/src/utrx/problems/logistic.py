"""L2-regularized logistic regression oracle on sparse data."""

from __future__ import annotations

import logging

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from public import public
from scipy.special import expit

from utrx.base import Matrix, Vector
from utrx.errors import ConfigurationError, DataError
from utrx.problems.base import ObjectiveOracle
from utrx.tools.typing import typechecked

logger = logging.getLogger(__name__)

DEFAULT_GAMMA = 1e-8

# max over t of |s(1-s)(1-2s)| with s = expit(t), equal to 1/(6 sqrt(3))
_THIRD_DERIVATIVE_BOUND = 1.0 / (6.0 * np.sqrt(3.0))


@public
@dataclass
class Dataset:
    """
    Binary classification data.

    Attributes
    ----------
    features : scipy.sparse.csr_matrix
        ``N x n`` matrix whose rows are the samples a_i.
    labels : Vector
        Labels b_i, each exactly -1 or +1.
    """

    features: sp.csr_matrix
    labels: Vector

    def __post_init__(self) -> None:
        self.features = sp.csr_matrix(self.features, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.float64).ravel()
        if self.features.shape[0] != self.labels.size:
            raise DataError(
                f"{self.features.shape[0]} feature rows but "
                f"{self.labels.size} labels"
            )
        if not bool(np.all(np.abs(self.labels) == 1.0)):
            bad = sorted(set(self.labels[np.abs(self.labels) != 1.0]))
            raise DataError(f"labels must be -1 or +1, found {bad[:5]}")

    @property
    def N(self) -> int:  # noqa: N802
        return int(self.features.shape[0])

    @property
    def n(self) -> int:
        return int(self.features.shape[1])


@public
@typechecked
def synthetic_dataset(
    N: int,  # noqa: N803
    n: int,
    seed: int = 0,
    density: float = 1.0,
) -> Dataset:
    """
    Draw a reproducible, non-separable classification dataset.

    Labels are Bernoulli draws with probability ``expit(a_i^T w)`` for a
    hidden weight vector ``w`` scaled so that ``a_i^T w`` has unit variance.
    """
    if N < 1 or n < 1:
        raise ConfigurationError("synthetic dataset needs N >= 1 and n >= 1")
    rng = np.random.default_rng(seed)
    dense = rng.standard_normal((N, n))
    if density < 1.0:
        dense *= rng.random((N, n)) < density
    weights = rng.standard_normal(n) / np.sqrt(n)
    probabilities = expit(dense @ weights)
    labels = np.where(rng.random(N) < probabilities, 1.0, -1.0)
    return Dataset(sp.csr_matrix(dense), labels)


def _log1pexp(t: np.ndarray) -> np.ndarray:
    """Evaluate log(1 + exp(t)) without overflow."""
    out = np.empty_like(t)
    positive = t > 0
    out[positive] = t[positive] + np.log1p(np.exp(-t[positive]))
    out[~positive] = np.log1p(np.exp(t[~positive]))
    return out


@public
@typechecked
class LogisticRegression(ObjectiveOracle):
    """
    f(x) = (1/N) sum_i log(1 + exp(-b_i a_i^T x)) + (gamma/2) ||x||^2.
    """

    def __init__(self, data: Dataset, gamma: float = DEFAULT_GAMMA) -> None:
        if data.N == 0 or data.n == 0:
            raise ConfigurationError("logistic regression needs data")
        if gamma < 0:
            raise ConfigurationError(f"gamma must be >= 0, got {gamma}")
        super().__init__(data.n)
        self.data = data
        self.gamma = gamma
        # rows scaled by their label, so margins are signed_features @ x
        self._signed = sp.csr_matrix(
            sp.diags(data.labels) @ data.features
        )

    def _margins(self, x: Vector) -> np.ndarray:
        return np.asarray(self._signed @ x, dtype=np.float64)

    def _value(self, x: Vector) -> float:
        loss = float(np.mean(_log1pexp(-self._margins(x))))
        return loss + 0.5 * self.gamma * float(np.dot(x, x))

    def _gradient(self, x: Vector) -> Vector:
        weights = expit(-self._margins(x))
        grad = -(self._signed.T @ weights) / self.data.N
        return np.asarray(grad, dtype=np.float64) + self.gamma * x

    def _curvature(self, x: Vector) -> np.ndarray:
        margins = self._margins(x)
        return np.asarray(expit(margins) * expit(-margins))

    def _hessian(self, x: Vector) -> Matrix:
        scaled = sp.diags(self._curvature(x)) @ self.data.features
        hess = (self.data.features.T @ scaled).toarray() / self.data.N
        hess = 0.5 * (hess + hess.T)
        hess[np.diag_indices_from(hess)] += self.gamma
        return np.asarray(hess, dtype=np.float64)

    def _hessian_vector(self, x: Vector, v: Vector) -> Vector:
        product = self._curvature(x) * (self.data.features @ v)
        result = (self.data.features.T @ product) / self.data.N
        return np.asarray(result, dtype=np.float64) + self.gamma * v

    def lipschitz_hint(self) -> float:
        """Return a global Lipschitz constant of the Hessian."""
        row_norms = np.sqrt(
            np.asarray(self.data.features.multiply(self.data.features).sum(1))
        ).ravel()
        return float(_THIRD_DERIVATIVE_BOUND * np.mean(row_norms**3))


@public
@typechecked
def logistic_oracle(
    data: Dataset, gamma: float = DEFAULT_GAMMA
) -> LogisticRegression:
    """Return the logistic-regression oracle for ``data``."""
    logger.debug(
        "logistic oracle on N=%d, n=%d, gamma=%g", data.N, data.n, gamma
    )
    return LogisticRegression(data, gamma)
