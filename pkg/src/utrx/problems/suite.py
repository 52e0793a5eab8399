"""Built-in problem suite and problem lookup by name."""

from __future__ import annotations

from pathlib import Path
from typing import Callable, Dict, List

import numpy as np

from public import public

from utrx.errors import ConfigurationError
from utrx.problems.base import ProblemInstance
from utrx.problems.functions import (
    ConvexQuadratic,
    QuadraticPlusQuartic,
    QuarticSaddle,
    Rosenbrock,
    SeparableQuartic,
)
from utrx.problems.libsvm import load_libsvm
from utrx.problems.logistic import (
    DEFAULT_GAMMA,
    Dataset,
    logistic_oracle,
    synthetic_dataset,
)
from utrx.tools.typing import typechecked

# half-width of the box around the valley followed from x0; the hint
# bounds the Hessian Lipschitz constant on this box only, not on the
# whole sublevel set of x0 where x_1 ranges over [-3.9, 5.9]
ROSENBROCK_BOX = 1.3

LIBSVM_SUFFIXES = (".libsvm", ".svm", ".txt", ".svmlight")


def _rosenbrock(dimension: int) -> ProblemInstance:
    oracle = Rosenbrock(dimension)
    return ProblemInstance(
        name=f"rosenbrock_{dimension}",
        oracle=oracle,
        start=Rosenbrock.classical_start(dimension),
        lipschitz_hint=Rosenbrock.lipschitz_on_box(ROSENBROCK_BOX),
        known_optimum=(np.ones(dimension), 0.0),
        description="chained Rosenbrock, classical start",
    )


def _quadratic_2() -> ProblemInstance:
    return ProblemInstance(
        name="quadratic_2",
        oracle=ConvexQuadratic(np.array([1.0, 10.0])),
        start=np.array([1.0, 1.0]),
        # the Hessian is constant; any positive constant is valid
        lipschitz_hint=1e-6,
        known_optimum=(np.zeros(2), 0.0),
        convex=True,
    )


def _quadratic_ill() -> ProblemInstance:
    return ProblemInstance(
        name="quadratic_ill_20",
        oracle=ConvexQuadratic.with_condition(20, 1e4),
        start=np.ones(20),
        lipschitz_hint=1e-6,
        known_optimum=(np.zeros(20), 0.0),
        convex=True,
        description="diagonal quadratic with condition number 1e4",
    )


def _quartic_saddle() -> ProblemInstance:
    start = np.array([1e-3, 1e-3, 0.0, 0.0])
    optimum = np.array([1.0, 0.0, 0.0, 0.0])
    return ProblemInstance(
        name="quartic_saddle_4",
        oracle=QuarticSaddle(4),
        start=start,
        lipschitz_hint=QuarticSaddle.lipschitz_hint(start),
        known_optimum=(optimum, -0.25),
        description="strict saddle at the origin",
    )


def _separable_quartic() -> ProblemInstance:
    start = np.array([0.5, -0.3, 2.0, -1.5, 0.1, 1.2, -0.8, 0.7, -2.0, 0.05])
    oracle = SeparableQuartic(start.size)
    return ProblemInstance(
        name="separable_quartic_10",
        oracle=oracle,
        start=start,
        lipschitz_hint=oracle.lipschitz_hint(start),
        known_optimum=(np.sign(start), 0.0),
        description="sum of double wells",
    )


def _convex_quartic(dimension: int) -> ProblemInstance:
    diagonal = np.linspace(1.0, float(dimension), dimension)
    minimizer = np.where(np.arange(dimension) % 2 == 0, 0.5, -0.5)
    oracle = QuadraticPlusQuartic(diagonal, minimizer)
    start = np.zeros(dimension) if dimension <= 5 else np.ones(dimension)
    return ProblemInstance(
        name=f"convex_quartic_{dimension}",
        oracle=oracle,
        start=start,
        lipschitz_hint=oracle.lipschitz_hint(start),
        known_optimum=(minimizer, oracle._value(minimizer)),
        convex=True,
        description="strongly convex quadratic plus quartic",
    )


@public
@typechecked
def logistic_instance(
    data: Dataset, name: str, gamma: float = DEFAULT_GAMMA
) -> ProblemInstance:
    """Wrap a dataset as a logistic-regression problem started at 0."""
    oracle = logistic_oracle(data, gamma)
    return ProblemInstance(
        name=name,
        oracle=oracle,
        start=np.zeros(data.n),
        lipschitz_hint=oracle.lipschitz_hint(),
        convex=True,
        description=f"logistic regression, N={data.N}, n={data.n}",
    )


def _logistic_synthetic() -> ProblemInstance:
    return logistic_instance(
        synthetic_dataset(200, 20, seed=7), "logistic_200x20"
    )


_FACTORIES: Dict[str, Callable[[], ProblemInstance]] = {
    "rosenbrock_2": lambda: _rosenbrock(2),
    "rosenbrock_10": lambda: _rosenbrock(10),
    "rosenbrock_100": lambda: _rosenbrock(100),
    "quadratic_2": _quadratic_2,
    "quadratic_ill_20": _quadratic_ill,
    "quartic_saddle_4": _quartic_saddle,
    "separable_quartic_10": _separable_quartic,
    "convex_quartic_5": lambda: _convex_quartic(5),
    "convex_quartic_20": lambda: _convex_quartic(20),
    "logistic_200x20": _logistic_synthetic,
}


@public
def problem_names() -> List[str]:
    """Return the names of the built-in instances."""
    return sorted(_FACTORIES)


@public
def builtin_suite() -> List[ProblemInstance]:
    """Return fresh copies of every built-in instance."""
    return [_FACTORIES[name]() for name in problem_names()]


def is_libsvm_path(name: str) -> bool:
    path = Path(name)
    return path.suffix in LIBSVM_SUFFIXES or path.is_file()


@public
@typechecked
def get_problem(name: str) -> ProblemInstance:
    """
    Build a fresh problem instance from a suite name or a LIBSVM path.

    LIBSVM files become logistic-regression instances named after the
    file stem.
    """
    if name in _FACTORIES:
        return _FACTORIES[name]()
    if is_libsvm_path(name):
        path = Path(name)
        if not path.is_file():
            raise ConfigurationError(f"LIBSVM file not found: {name}")
        return logistic_instance(load_libsvm(path), path.stem)
    raise ConfigurationError(
        f"unknown problem {name!r}; expected one of {problem_names()} "
        "or a LIBSVM file path"
    )


@public
@typechecked
def validate_problem_name(name: str) -> None:
    """Raise ConfigurationError unless ``get_problem(name)`` can succeed."""
    if name in _FACTORIES:
        return
    if is_libsvm_path(name) and Path(name).is_file():
        return
    raise ConfigurationError(f"unknown problem {name!r}")
