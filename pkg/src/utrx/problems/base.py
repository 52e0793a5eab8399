"""Objective oracle contract and problem instances."""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from public import public
from scipy.sparse.linalg import LinearOperator

from utrx.base import EvalCounters, Matrix, Vector
from utrx.errors import ConfigurationError, ContractViolation
from utrx.tools.typing import as_float_array, typechecked

HESSIAN_SYMMETRY_RTOL = 1e-12


@public
@typechecked
def check_symmetric(
    matrix: Matrix, rtol: float = HESSIAN_SYMMETRY_RTOL
) -> None:
    """
    Raise ContractViolation unless ``matrix`` is square and symmetric.

    The tolerance is relative to ``max(1, max|matrix|)``.
    """
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ContractViolation(
            f"expected a square matrix, got {matrix.shape}"
        )
    if matrix.size == 0:
        return
    scale = max(1.0, float(np.max(np.abs(matrix))))
    asymmetry = float(np.max(np.abs(matrix - matrix.T)))
    if asymmetry > rtol * scale:
        raise ContractViolation(
            f"matrix is not symmetric: max|H - H^T| = {asymmetry:.3e}"
        )


@public
@typechecked
class ObjectiveOracle(ABC):
    """
    Value, gradient and Hessian evaluations of an objective function.

    Subclasses implement the underscored hooks; the public methods count
    every call in ``counters`` and validate their input point.
    """

    dimension: int
    counters: EvalCounters

    def __init__(self, dimension: int) -> None:
        if dimension < 1:
            raise ConfigurationError(
                f"dimension must be >= 1, got {dimension}"
            )
        self.dimension = dimension
        self.counters = EvalCounters()

    def _check_point(self, x: Vector) -> None:
        if x.shape != (self.dimension,):
            raise ConfigurationError(
                f"expected a point of shape ({self.dimension},), "
                f"got {x.shape}"
            )
        if not bool(np.all(np.isfinite(x))):
            raise ConfigurationError("point coordinates must be finite")

    def value(self, x: Vector) -> float:
        self._check_point(x)
        self.counters.f += 1
        return float(self._value(x))

    def gradient(self, x: Vector) -> Vector:
        self._check_point(x)
        self.counters.g += 1
        return np.asarray(self._gradient(x), dtype=np.float64)

    def hessian(self, x: Vector) -> Matrix:
        """Return the dense Hessian, asserting its symmetry."""
        self._check_point(x)
        self.counters.h += 1
        hess = np.asarray(self._hessian(x), dtype=np.float64)
        check_symmetric(hess)
        return hess

    def hessian_vector(self, x: Vector, v: Vector) -> Vector:
        self._check_point(x)
        self.counters.hv += 1
        return np.asarray(self._hessian_vector(x, v), dtype=np.float64)

    def hessian_operator(self, x: Vector) -> LinearOperator:
        """Return the Hessian at ``x`` as a symmetric LinearOperator."""
        point = np.array(x, dtype=np.float64)

        def matvec(v: np.ndarray) -> np.ndarray:
            return self.hessian_vector(point, np.ravel(v).astype(np.float64))

        return LinearOperator(
            (self.dimension, self.dimension),
            matvec=matvec,
            rmatvec=matvec,
            dtype=np.float64,
        )

    @abstractmethod
    def _value(self, x: Vector) -> float:
        """Evaluate f(x)."""

    @abstractmethod
    def _gradient(self, x: Vector) -> Vector:
        """Evaluate the gradient of f at x."""

    @abstractmethod
    def _hessian(self, x: Vector) -> Matrix:
        """Evaluate the Hessian of f at x."""

    def _hessian_vector(self, x: Vector, v: Vector) -> Vector:
        return self._hessian(x) @ v


@public
@dataclass
class ProblemInstance:
    """
    A named minimization problem with its starting point.

    Attributes
    ----------
    name : str
        Problem name used in reports and file names.
    oracle : ObjectiveOracle
        Objective evaluations; one instance is owned by one run.
    start : Vector
        Starting point x0.
    lipschitz_hint : float, optional
        Lipschitz constant of the Hessian, valid on the region the
        methods explore from ``start``.
    known_optimum : tuple of (Vector, float), optional
        A minimizer and the optimal value.
    convex : bool
        Whether the objective is convex.
    """

    name: str
    oracle: ObjectiveOracle
    start: Vector
    lipschitz_hint: Optional[float] = None
    known_optimum: Optional[Tuple[Vector, float]] = None
    convex: bool = False
    description: str = ""

    def __post_init__(self) -> None:
        self.start = as_float_array(self.start)
        if self.start.shape != (self.oracle.dimension,):
            raise ConfigurationError(
                f"start has shape {self.start.shape}, expected "
                f"({self.oracle.dimension},)"
            )
        if not bool(np.all(np.isfinite(self.start))):
            raise ConfigurationError("start must be finite")
        if self.lipschitz_hint is not None and not self.lipschitz_hint > 0:
            raise ConfigurationError(
                f"lipschitz_hint must be > 0, got {self.lipschitz_hint}"
            )

    @property
    def dimension(self) -> int:
        return self.oracle.dimension

    @property
    def optimal_value(self) -> Optional[float]:
        if self.known_optimum is None:
            return None
        return float(self.known_optimum[1])
