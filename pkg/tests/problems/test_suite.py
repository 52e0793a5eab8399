"""Tests for the built-in problem suite."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from utrx.errors import ConfigurationError, ContractViolation
from utrx.problems import (
    ConvexQuadratic,
    ObjectiveOracle,
    builtin_suite,
    dump_libsvm,
    finite_difference_check,
    get_problem,
    problem_names,
    synthetic_dataset,
    validate_problem_name,
)

SUITE_NAMES = [
    "convex_quartic_20",
    "convex_quartic_5",
    "logistic_200x20",
    "quadratic_2",
    "quadratic_ill_20",
    "quartic_saddle_4",
    "rosenbrock_10",
    "rosenbrock_100",
    "rosenbrock_2",
    "separable_quartic_10",
]


class SkewHessian(ObjectiveOracle):
    """Oracle whose Hessian is not symmetric."""

    def _value(self, x: np.ndarray) -> float:
        return float(np.dot(x, x))

    def _gradient(self, x: np.ndarray) -> np.ndarray:
        return 2.0 * x

    def _hessian(self, x: np.ndarray) -> np.ndarray:
        return np.array([[2.0, 1.0], [0.0, 2.0]])


def test_problem_names() -> None:
    """Test that the suite lists its instances in sorted order."""
    assert problem_names() == SUITE_NAMES
    assert [p.name for p in builtin_suite()] == SUITE_NAMES


def test_get_problem_returns_fresh_instances() -> None:
    """Test that every lookup builds a new oracle."""
    first = get_problem("rosenbrock_2")
    second = get_problem("rosenbrock_2")
    assert first.oracle is not second.oracle
    first.oracle.value(first.start)
    assert second.oracle.counters.f == 0


@pytest.mark.parametrize("name", SUITE_NAMES)
def test_oracles_match_finite_differences(name: str) -> None:
    """Test gradients and Hessian products against central differences."""
    problem = get_problem(name)
    rng = np.random.default_rng(3)
    x = problem.start + 0.1 * rng.standard_normal(problem.dimension)
    grad_err, hess_err = finite_difference_check(problem.oracle, x)
    assert grad_err <= 1e-6
    assert hess_err <= 1e-6


@pytest.mark.parametrize("name", SUITE_NAMES)
def test_hessian_operator_matches_dense(name: str) -> None:
    """Test that Hessian products agree with the dense Hessian."""
    problem = get_problem(name)
    rng = np.random.default_rng(4)
    v = rng.standard_normal(problem.dimension)
    dense = problem.oracle.hessian(problem.start) @ v
    product = problem.oracle.hessian_operator(problem.start).matvec(v)
    assert np.allclose(product, dense, rtol=1e-10, atol=1e-10)


@pytest.mark.parametrize(
    "name",
    [name for name in SUITE_NAMES if not name.startswith("logistic")],
)
def test_known_optimum_is_stationary(name: str) -> None:
    """Test that known minimizers have the stated value and zero gradient."""
    problem = get_problem(name)
    assert problem.known_optimum is not None
    x_star, f_star = problem.known_optimum
    assert problem.oracle.value(x_star) == pytest.approx(f_star, abs=1e-12)
    assert np.linalg.norm(problem.oracle.gradient(x_star)) <= 1e-12


def test_quartic_saddle_curvature() -> None:
    """Test the negative curvature at the start of the saddle instance."""
    problem = get_problem("quartic_saddle_4")
    hess = problem.oracle.hessian(problem.start)
    assert hess[0, 0] == pytest.approx(3e-6 - 1.0)
    assert np.allclose(np.diag(hess)[1:], 1.0)


def test_unknown_problem() -> None:
    """Test that an unknown name raises ConfigurationError."""
    with pytest.raises(ConfigurationError):
        get_problem("no_such_problem")
    with pytest.raises(ConfigurationError):
        validate_problem_name("no_such_problem")
    with pytest.raises(ConfigurationError):
        get_problem("missing_file.libsvm")


def test_libsvm_problem_by_path(tmp_path: Path) -> None:
    """Test that a LIBSVM path becomes a logistic instance named by stem."""
    path = dump_libsvm(synthetic_dataset(30, 4, seed=2), tmp_path / "toy.svm")
    validate_problem_name(str(path))
    problem = get_problem(str(path))
    assert problem.name == "toy"
    assert problem.dimension == 4
    assert problem.convex
    assert problem.lipschitz_hint is not None
    assert np.array_equal(problem.start, np.zeros(4))


def test_oracle_counts_evaluations() -> None:
    """Test the evaluation counters of an oracle."""
    oracle = ConvexQuadratic(np.array([1.0, 2.0]))
    x = np.array([1.0, 1.0])
    oracle.value(x)
    oracle.gradient(x)
    oracle.gradient(x)
    oracle.hessian(x)
    oracle.hessian_vector(x, x)
    assert oracle.counters.as_dict() == {"f": 1, "g": 2, "h": 1, "hv": 1}


def test_oracle_rejects_bad_points() -> None:
    """Test point validation of the public oracle methods."""
    oracle = ConvexQuadratic(np.array([1.0, 2.0]))
    with pytest.raises(ConfigurationError):
        oracle.value(np.zeros(3))
    with pytest.raises(ConfigurationError):
        oracle.gradient(np.array([np.inf, 0.0]))


def test_asymmetric_hessian_is_a_contract_violation() -> None:
    """Test that a non-symmetric Hessian is reported."""
    oracle = SkewHessian(2)
    with pytest.raises(ContractViolation):
        oracle.hessian(np.zeros(2))


def test_invalid_quadratic() -> None:
    """Test the validation of the quadratic oracle."""
    with pytest.raises(ConfigurationError):
        ConvexQuadratic(np.array([1.0, 0.0]))
    with pytest.raises(ConfigurationError):
        ConvexQuadratic.with_condition(3, 0.5)
