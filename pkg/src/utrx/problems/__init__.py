"""Objective oracles, the built-in suite and data ingestion."""

from utrx.problems.base import (
    ObjectiveOracle,
    ProblemInstance,
    check_symmetric,
)
from utrx.problems.checks import finite_difference_check
from utrx.problems.functions import (
    ConvexQuadratic,
    QuadraticPlusQuartic,
    QuarticSaddle,
    Rosenbrock,
    SeparableQuartic,
)
from utrx.problems.libsvm import dump_libsvm, load_libsvm
from utrx.problems.logistic import (
    DEFAULT_GAMMA,
    Dataset,
    LogisticRegression,
    logistic_oracle,
    synthetic_dataset,
)
from utrx.problems.suite import (
    builtin_suite,
    get_problem,
    logistic_instance,
    problem_names,
    validate_problem_name,
)

__all__ = [
    "DEFAULT_GAMMA",
    "ConvexQuadratic",
    "Dataset",
    "LogisticRegression",
    "ObjectiveOracle",
    "ProblemInstance",
    "QuadraticPlusQuartic",
    "QuarticSaddle",
    "Rosenbrock",
    "SeparableQuartic",
    "builtin_suite",
    "check_symmetric",
    "dump_libsvm",
    "finite_difference_check",
    "get_problem",
    "load_libsvm",
    "logistic_instance",
    "logistic_oracle",
    "problem_names",
    "synthetic_dataset",
    "validate_problem_name",
]
