"""Analytic test functions of the built-in suite."""

from __future__ import annotations

from typing import Optional

import numpy as np

from public import public

from utrx.base import Matrix, Vector
from utrx.errors import ConfigurationError
from utrx.problems.base import ObjectiveOracle
from utrx.tools.typing import as_float_array, typechecked


@public
@typechecked
class Rosenbrock(ObjectiveOracle):
    """Chained Rosenbrock function.

    f(x) = sum_i 100 (x_{i+1} - x_i^2)^2 + (1 - x_i)^2, minimized at the
    all-ones point with value 0.
    """

    def __init__(self, dimension: int = 2) -> None:
        if dimension < 2:
            raise ConfigurationError("Rosenbrock needs dimension >= 2")
        super().__init__(dimension)

    @staticmethod
    def classical_start(dimension: int) -> Vector:
        start = np.ones(dimension)
        start[0::2] = -1.2
        return start

    @staticmethod
    def lipschitz_on_box(bound: float) -> float:
        """
        Bound the Hessian Lipschitz constant on ``max |x_i| <= bound``.

        The Hessian difference has diagonal entries ``2400 x_i dx_i - 400
        dx_{i+1}`` and off-diagonal entries ``-400 dx_i``; a row-sum bound
        gives the returned value.
        """
        return 2400.0 * bound + 1200.0

    def _value(self, x: Vector) -> float:
        head, tail = x[:-1], x[1:]
        return float(
            np.sum(100.0 * (tail - head**2) ** 2 + (1.0 - head) ** 2)
        )

    def _gradient(self, x: Vector) -> Vector:
        head, tail = x[:-1], x[1:]
        inner = tail - head**2
        grad = np.zeros_like(x)
        grad[:-1] = -400.0 * head * inner - 2.0 * (1.0 - head)
        grad[1:] += 200.0 * inner
        return grad

    def _hessian(self, x: Vector) -> Matrix:
        head, tail = x[:-1], x[1:]
        diag = np.zeros_like(x)
        diag[:-1] = 1200.0 * head**2 - 400.0 * tail + 2.0
        diag[1:] += 200.0
        off = -400.0 * head
        return np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)

    def _hessian_vector(self, x: Vector, v: Vector) -> Vector:
        head, tail = x[:-1], x[1:]
        diag = np.zeros_like(x)
        diag[:-1] = 1200.0 * head**2 - 400.0 * tail + 2.0
        diag[1:] += 200.0
        off = -400.0 * head
        result = diag * v
        result[:-1] += off * v[1:]
        result[1:] += off * v[:-1]
        return result


@public
@typechecked
class ConvexQuadratic(ObjectiveOracle):
    """Diagonal convex quadratic ``1/2 x^T diag(d) x``."""

    def __init__(self, diagonal: Vector) -> None:
        diagonal = as_float_array(diagonal)
        if not bool(np.all(diagonal > 0)):
            raise ConfigurationError("quadratic diagonal must be positive")
        super().__init__(diagonal.size)
        self.diagonal = diagonal

    @classmethod
    def with_condition(
        cls, dimension: int, condition: float
    ) -> "ConvexQuadratic":
        """Build a quadratic whose Hessian has the given condition number."""
        if condition < 1:
            raise ConfigurationError("condition number must be >= 1")
        return cls(np.logspace(0.0, np.log10(condition), dimension))

    def _value(self, x: Vector) -> float:
        return float(0.5 * np.dot(x, self.diagonal * x))

    def _gradient(self, x: Vector) -> Vector:
        return self.diagonal * x

    def _hessian(self, x: Vector) -> Matrix:
        return np.diag(self.diagonal)

    def _hessian_vector(self, x: Vector, v: Vector) -> Vector:
        return self.diagonal * v


@public
@typechecked
class QuarticSaddle(ObjectiveOracle):
    """
    Saddle-point test function.

    f(x) = x_1^4/4 - x_1^2/2 + 1/2 sum_{i>=2} x_i^2 has a strict saddle at
    the origin and minimizers at x_1 = +-1 with value -1/4.
    """

    def __init__(self, dimension: int = 4) -> None:
        super().__init__(dimension)

    @staticmethod
    def lipschitz_hint(start: Vector) -> float:
        """
        Bound the Hessian Lipschitz constant on the sublevel set of start.

        Only the x_1 curvature ``3 x_1^2 - 1`` varies; on the sublevel set
        ``x_1^4/4 - x_1^2/2 <= f(start)`` the coordinate is bounded, and a
        factor 1.5 covers trial points slightly outside it.
        """
        level = 0.25 * start[0] ** 4 - 0.5 * start[0] ** 2
        level += 0.5 * float(np.sum(start[1:] ** 2))
        # x^4/4 - x^2/2 <= level  <=>  x^2 <= 1 + sqrt(1 + 4 level)
        bound = np.sqrt(1.0 + np.sqrt(max(0.0, 1.0 + 4.0 * level)))
        return float(1.5 * 6.0 * bound)

    def _value(self, x: Vector) -> float:
        return float(
            0.25 * x[0] ** 4 - 0.5 * x[0] ** 2 + 0.5 * np.sum(x[1:] ** 2)
        )

    def _gradient(self, x: Vector) -> Vector:
        grad = x.copy()
        grad[0] = x[0] ** 3 - x[0]
        return grad

    def _hessian(self, x: Vector) -> Matrix:
        diag = np.ones_like(x)
        diag[0] = 3.0 * x[0] ** 2 - 1.0
        return np.diag(diag)

    def _hessian_vector(self, x: Vector, v: Vector) -> Vector:
        result = v.copy()
        result[0] *= 3.0 * x[0] ** 2 - 1.0
        return result


@public
@typechecked
class SeparableQuartic(ObjectiveOracle):
    """
    Separable nonconvex double-well ``sum_i (x_i^2 - 1)^2 / 4``.

    Every sign pattern of +-1 is a global minimizer with value 0 and every
    coordinate at 0 is a local maximizer along that axis.
    """

    def _value(self, x: Vector) -> float:
        return float(0.25 * np.sum((x**2 - 1.0) ** 2))

    def _gradient(self, x: Vector) -> Vector:
        return x**3 - x

    def _hessian(self, x: Vector) -> Matrix:
        return np.diag(3.0 * x**2 - 1.0)

    def _hessian_vector(self, x: Vector, v: Vector) -> Vector:
        return (3.0 * x**2 - 1.0) * v

    def lipschitz_hint(self, start: Vector) -> float:
        """Bound ``6 max|x_i|`` on the sublevel set of ``start``."""
        level = self._value(start)
        bound = np.sqrt(1.0 + 2.0 * np.sqrt(level))
        return float(1.5 * 6.0 * bound)


@public
@typechecked
class QuadraticPlusQuartic(ObjectiveOracle):
    """
    Strongly convex ``1/2 x^T D x + 1/4 sum x_i^4 - b^T x``.

    ``b`` is derived from the requested minimizer so the optimum is known
    exactly. A nonzero minimizer keeps the third derivative nonzero there.
    """

    def __init__(
        self, diagonal: Vector, minimizer: Optional[Vector] = None
    ) -> None:
        diagonal = as_float_array(diagonal)
        if not bool(np.all(diagonal > 0)):
            raise ConfigurationError("quadratic diagonal must be positive")
        super().__init__(diagonal.size)
        self.diagonal = diagonal
        if minimizer is None:
            minimizer = np.zeros(diagonal.size)
        self.minimizer = as_float_array(minimizer)
        if self.minimizer.shape != diagonal.shape:
            raise ConfigurationError("minimizer and diagonal differ in size")
        self.shift = self.diagonal * self.minimizer + self.minimizer**3

    def _value(self, x: Vector) -> float:
        return float(
            0.5 * np.dot(x, self.diagonal * x)
            + 0.25 * np.sum(x**4)
            - np.dot(self.shift, x)
        )

    def _gradient(self, x: Vector) -> Vector:
        return self.diagonal * x + x**3 - self.shift

    def _hessian(self, x: Vector) -> Matrix:
        return np.diag(self.diagonal + 3.0 * x**2)

    def _hessian_vector(self, x: Vector, v: Vector) -> Vector:
        return (self.diagonal + 3.0 * x**2) * v

    def lipschitz_hint(self, start: Vector) -> float:
        """
        Bound ``6 max|x_i|`` on the sublevel set of ``start``.

        Strong convexity with modulus ``min(D)`` confines the sublevel set
        to a ball around the minimizer.
        """
        gap = self._value(start) - self._value(self.minimizer)
        radius = np.sqrt(2.0 * max(gap, 0.0) / float(np.min(self.diagonal)))
        bound = float(np.max(np.abs(self.minimizer))) + radius
        return float(6.0 * max(bound, 1e-3))
