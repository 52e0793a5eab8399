"""Tests for the accelerated universal trust-region method."""

from __future__ import annotations

import numpy as np
import pytest

from utrx.accel import (
    AccelState,
    CubicBregman,
    accel_minimize,
    bregman_divergence,
    contracted_oracle,
    inner_tolerance,
)
from utrx.adaptive import reference_minimum
from utrx.base import RunStatus
from utrx.errors import ConfigurationError
from utrx.problems import ConvexQuadratic, finite_difference_check
from utrx.problems.suite import get_problem
from utrx.utr import utr_minimize


def test_bregman_examples() -> None:
    """Test the cubic divergence on hand-computed pairs."""
    b = CubicBregman(np.zeros(2))
    x = np.array([0.3, -0.4])
    assert bregman_divergence(b, x, x) == 0.0
    unit = np.array([0.6, 0.8])
    assert bregman_divergence(b, np.zeros(2), unit) == pytest.approx(1 / 3)
    e1 = np.array([1.0, 0.0])
    assert bregman_divergence(b, e1, 2.0 * e1) == pytest.approx(4 / 3)


def test_bregman_is_nonnegative() -> None:
    """Test nonnegativity on random pairs."""
    rng = np.random.default_rng(8)
    b = CubicBregman(rng.standard_normal(5))
    for _ in range(1000):
        x = rng.standard_normal(5)
        y = rng.standard_normal(5)
        assert bregman_divergence(b, x, y) > 0.0


def test_bregman_shape_mismatch() -> None:
    """Test that points of another size are rejected."""
    b = CubicBregman(np.zeros(2))
    with pytest.raises(ConfigurationError):
        bregman_divergence(b, np.zeros(2), np.zeros(3))


def test_bregman_derivatives() -> None:
    """Test the generator derivatives, including the anchor."""
    b = CubicBregman(np.array([1.0, 1.0]))
    assert np.array_equal(b.hessian(np.array([1.0, 1.0])), np.zeros((2, 2)))
    x = np.array([4.0, 5.0])
    assert b.value(x) == pytest.approx(125.0 / 3.0)
    assert np.allclose(b.gradient(x), [15.0, 20.0])
    v = np.array([1.0, -2.0])
    assert np.allclose(b.hessian_vector(x, v), b.hessian(x) @ v)


def test_weights_follow_closed_form() -> None:
    """Test A_k = k (k+1) (2k+1) / (54 M)."""
    M = 2.0
    state = AccelState(np.zeros(2), np.zeros(2), np.zeros(2), M)
    assert state.next_weight() == pytest.approx(1.0 / (9.0 * M))
    for k in range(1, 31):
        state.advance(np.zeros(2))
        expected = k * (k + 1) * (2 * k + 1) / (54.0 * M)
        assert state.A == pytest.approx(expected, rel=1e-12)
    assert state.k == 30
    assert len(state.weights) == 30


def test_advance_moves_along_the_estimate() -> None:
    """Test the convex combination of the next iterate."""
    state = AccelState(np.zeros(1), np.zeros(1), np.zeros(1), 1.0)
    state.advance(np.array([3.0]))
    assert np.allclose(state.x, [3.0])
    a = state.next_weight()
    state.advance(np.array([0.0]))
    assert np.allclose(state.x, [3.0 * (1.0 / 9.0) / (1.0 / 9.0 + a)])


def test_inner_tolerance() -> None:
    """Test the inner accuracy schedule."""
    assert inner_tolerance(1e-6, 0) == pytest.approx(1e-4, rel=1e-12)
    assert inner_tolerance(1e-6, 3) == pytest.approx(2.5e-5, rel=1e-12)
    assert inner_tolerance(10.0, 1) == 0.5


def test_contracted_oracle_at_first_step() -> None:
    """Test h = a f + beta(v0; x) when A_k = 0."""
    f = ConvexQuadratic(np.array([1.0, 2.0]))
    b = CubicBregman(np.zeros(2))
    v0 = np.array([0.5, 0.5])
    h = contracted_oracle(f, 0.5, 0.5, np.ones(2), b, v0)
    x = np.array([1.0, -1.0])
    expected = 0.5 * f.value(x) + bregman_divergence(b, v0, x)
    assert h.value(x) == pytest.approx(expected)


def test_contracted_oracle_shares_counters() -> None:
    """Test that evaluations of h are counted on f."""
    f = ConvexQuadratic(np.ones(3))
    h = contracted_oracle(
        f, 1.0, 3.0, np.zeros(3), CubicBregman(np.ones(3)), np.zeros(3)
    )
    h.value(np.ones(3))
    h.gradient(np.ones(3))
    assert f.counters.f == 1
    assert f.counters.g == 1
    assert h.counters is f.counters


def test_contracted_gradient_vanishes_at_stationary_anchor() -> None:
    """Test that grad h(v_k) = 0 when f is stationary at z(v_k)."""
    f = ConvexQuadratic(np.ones(3))
    h = contracted_oracle(
        f, 1.0, 3.0, np.zeros(3), CubicBregman(np.ones(3)), np.zeros(3)
    )
    assert np.array_equal(h.gradient(np.zeros(3)), np.zeros(3))


def test_contracted_oracle_finite_differences() -> None:
    """Test the derivatives of h on a logistic objective."""
    problem = get_problem("logistic_200x20")
    rng = np.random.default_rng(9)
    h = contracted_oracle(
        problem.oracle,
        1.0 / 9.0,
        1.0 / 9.0 + 0.5,
        rng.standard_normal(20),
        CubicBregman(rng.standard_normal(20)),
        rng.standard_normal(20),
    )
    x = rng.standard_normal(20)
    grad_err, hess_err = finite_difference_check(h, x)
    assert grad_err <= 1e-6
    assert hess_err <= 1e-6
    assert np.allclose(
        h.hessian(x) @ np.ones(20), h.hessian_vector(x, np.ones(20))
    )


def test_contracted_oracle_validation() -> None:
    """Test the weight checks of the contracted oracle."""
    f = ConvexQuadratic(np.ones(2))
    b = CubicBregman(np.zeros(2))
    with pytest.raises(ConfigurationError):
        contracted_oracle(f, 0.0, 1.0, np.zeros(2), b, np.zeros(2))
    with pytest.raises(ConfigurationError):
        contracted_oracle(f, 1.0, 0.5, np.zeros(2), b, np.zeros(2))


def test_convex_quartic_reaches_target() -> None:
    """Test the optimality-gap stop on an instance with known optimum."""
    problem = get_problem("convex_quartic_5")
    assert problem.lipschitz_hint is not None
    f0 = problem.oracle.value(problem.start)
    report = accel_minimize(
        problem, problem.lipschitz_hint, eps=1e-4, max_outer=500
    )
    assert report.status is RunStatus.Target
    assert problem.optimal_value is not None
    assert report.f - problem.optimal_value <= 1e-4
    assert report.outer
    for rec in report.outer:
        assert rec.grad_h_norm <= rec.delta
        assert rec.f <= f0 + 1.0
    assert [rec.k for rec in report.outer] == list(range(len(report.outer)))
    inner_total = sum(rec.inner_iterations for rec in report.outer)
    assert inner_total == report.iteration_count


def test_logistic_reaches_reference() -> None:
    """Test the optimality-gap stop against a reference minimum."""
    f_star = reference_minimum(get_problem("logistic_200x20"))
    problem = get_problem("logistic_200x20")
    assert problem.lipschitz_hint is not None
    report = accel_minimize(
        problem,
        problem.lipschitz_hint,
        eps=1e-4,
        max_outer=500,
        f_star=f_star,
    )
    assert report.status is RunStatus.Target
    assert report.f - f_star <= 1e-4


def test_gradient_stop_without_optimum() -> None:
    """Test the first-order stop when no optimal value is used."""
    problem = get_problem("quadratic_2")
    report = accel_minimize(problem, 1e-9, use_known_optimum=False)
    assert report.status is RunStatus.FOSP
    assert report.grad_norm <= 1e-5
    assert report.outer[-1].grad_norm == pytest.approx(report.grad_norm)


def test_outer_budget() -> None:
    """Test that the outer budget ends the run with MaxIter."""
    problem = get_problem("convex_quartic_5")
    assert problem.lipschitz_hint is not None
    report = accel_minimize(
        problem, problem.lipschitz_hint, eps=1e-12, max_outer=2
    )
    assert report.status is RunStatus.MaxIter
    assert len(report.outer) == 2


@pytest.mark.slow
def test_outer_iterations_scale_with_accuracy() -> None:
    """Test that acceleration grows no faster than the plain method."""
    f_star = reference_minimum(get_problem("logistic_200x20"))
    counts = []
    for eps in (1e-4, 1e-6):
        problem = get_problem("logistic_200x20")
        assert problem.lipschitz_hint is not None
        report = accel_minimize(
            problem,
            problem.lipschitz_hint,
            eps=eps,
            max_outer=2000,
            f_star=f_star,
        )
        assert report.status is RunStatus.Target
        counts.append(len(report.outer))
    assert counts[0] >= 1

    plain = get_problem("logistic_200x20")
    assert plain.lipschitz_hint is not None
    baseline = utr_minimize(plain, plain.lipschitz_hint, eps=1e-9)
    gaps = [rec.f_after - f_star for rec in baseline.iterations]
    coarse, fine = (
        next(k + 1 for k, gap in enumerate(gaps) if gap <= target)
        for target in (1e-4, 1e-6)
    )
    assert counts[1] / counts[0] <= 3.0 * fine / coarse


def test_invalid_arguments() -> None:
    """Test argument validation of the accelerated method."""
    problem = get_problem("quadratic_2")
    with pytest.raises(ConfigurationError):
        accel_minimize(problem, 0.0)
    with pytest.raises(ConfigurationError):
        accel_minimize(problem, 1.0, max_outer=-1)
