"""Tests for the dense trust-region subproblem solver."""

from __future__ import annotations

import numpy as np
import pytest

from scipy.optimize import minimize_scalar
from scipy.sparse.linalg import aslinearoperator

from utrx.errors import ConfigurationError, ContractViolation
from utrx.trs import (
    TrsProblem,
    TrsSolution,
    kkt_residual,
    model_value,
    realized_radius,
    solve_trs_direct,
)

SIGMA_GRID = (0.0, 0.5, 2.0)


def _random_problem(rng: np.random.Generator) -> TrsProblem:
    n = int(rng.integers(2, 11))
    root = rng.standard_normal((n, n))
    return TrsProblem(
        hessian=0.5 * (root + root.T),
        gradient=rng.standard_normal(n),
        sigma=float(rng.choice(SIGMA_GRID)),
        radius=float(rng.uniform(0.1, 3.0)),
    )


def _hard_case_problem(rng: np.random.Generator) -> TrsProblem:
    n = int(rng.integers(2, 11))
    sigma = float(rng.choice(SIGMA_GRID))
    basis, _ = np.linalg.qr(rng.standard_normal((n, n)))
    tail = rng.standard_normal(n - 1)
    g = basis[:, 1:] @ tail
    shift = sigma * np.sqrt(np.linalg.norm(g))
    leftmost = -float(rng.uniform(0.5, 3.0))
    mu = np.concatenate(
        ([leftmost], leftmost + np.sort(rng.uniform(0.5, 5.0, n - 1)))
    )
    hess = basis @ np.diag(mu - shift) @ basis.T
    inner = float(np.linalg.norm(tail / (mu[1:] - leftmost)))
    return TrsProblem(
        hessian=0.5 * (hess + hess.T),
        gradient=g,
        sigma=sigma,
        radius=inner * float(rng.uniform(1.2, 3.0)),
    )


def _dual_optimum(p: TrsProblem) -> float:
    """Maximize the Lagrangian dual over a scan of the multiplier."""
    shifted = p.hessian + p.shift * np.eye(p.dimension)
    mu, basis = np.linalg.eigh(shifted)
    coeffs = basis.T @ p.gradient
    lower = max(0.0, -float(mu[0]))
    if lower > 0.0:
        lower += 1e-13 * max(1.0, float(np.max(np.abs(mu))))
    upper = lower + p.gnorm / p.radius + float(np.max(np.abs(mu))) + 1.0

    def dual(lam: float) -> float:
        return float(
            -0.5 * np.sum(coeffs**2 / (mu + lam)) - 0.5 * lam * p.radius**2
        )

    span = np.logspace(-12, np.log10(upper - lower), 600)
    grid = lower + np.concatenate(([0.0], span))
    values = [dual(lam) for lam in grid]
    best = int(np.argmax(values))
    left = grid[max(best - 1, 0)]
    right = grid[min(best + 1, len(grid) - 1)]
    refined = minimize_scalar(
        lambda lam: -dual(lam),
        bounds=(left, right),
        method="bounded",
        options={"xatol": 1e-14},
    )
    return max(max(values), -float(refined.fun))


def _assert_certified(
    p: TrsProblem, rng: np.random.Generator
) -> TrsSolution:
    solution = solve_trs_direct(p)
    feas, slack, stat, curv = kkt_residual(p, solution)
    scale = max(1.0, p.gnorm, float(np.max(np.abs(p.hessian))))
    assert feas <= 1e-9 * p.radius
    assert slack <= 1e-6 * scale
    assert stat <= 1e-6 * scale
    assert curv <= 1e-8 * scale

    best = model_value(p, solution.step)
    assert best == pytest.approx(-solution.model_decrease, abs=1e-9 * scale)
    for _ in range(20):
        trial = rng.standard_normal(p.dimension)
        trial *= p.radius * rng.uniform() / np.linalg.norm(trial)
        assert best <= model_value(p, trial) + 1e-9 * scale

    oracle = _dual_optimum(p)
    assert best <= oracle + 1e-6 * scale
    assert best >= oracle - 1e-6 * scale

    assert solution.on_boundary == (solution.multiplier > 0.0)
    if solution.on_boundary:
        assert solution.step_norm == pytest.approx(p.radius, rel=1e-8)
    return solution


def test_interior_newton_step() -> None:
    """Test that a fitting Newton step is returned with zero multiplier."""
    p = TrsProblem(np.diag([2.0, 4.0]), np.array([1.0, 1.0]), 0.0, 10.0)
    solution = solve_trs_direct(p)
    assert np.allclose(solution.step, [-0.5, -0.25])
    assert solution.multiplier == 0.0
    assert not solution.on_boundary


def test_boundary_step() -> None:
    """Test the boundary solution of an identity model."""
    p = TrsProblem(np.eye(2), np.array([3.0, 4.0]), 0.0, 1.0)
    solution = solve_trs_direct(p)
    assert np.allclose(solution.step, [-0.6, -0.8], atol=1e-10)
    assert solution.multiplier == pytest.approx(4.0, rel=1e-8)
    assert solution.model_decrease == pytest.approx(4.5, rel=1e-8)
    assert solution.on_boundary


def test_hard_case() -> None:
    """Test the leftmost eigenvector completion in the hard case."""
    p = TrsProblem(np.diag([-1.0, 1.0]), np.array([0.0, 1.0]), 0.0, 2.0)
    solution = solve_trs_direct(p)
    assert solution.hard_case
    assert solution.multiplier == pytest.approx(1.0)
    assert solution.step_norm == pytest.approx(2.0)
    assert solution.step[1] == pytest.approx(-0.5)
    assert abs(solution.step[0]) == pytest.approx(np.sqrt(3.75))
    feas, slack, stat, curv = kkt_residual(p, solution)
    assert max(feas, slack, stat, curv) <= 1e-10


def test_zero_gradient_with_negative_curvature() -> None:
    """Test that a stationary saddle moves along the leftmost eigenvector."""
    p = TrsProblem(np.diag([1.0, -2.0]), np.zeros(2), 0.0, 0.5)
    solution = solve_trs_direct(p)
    assert solution.multiplier == pytest.approx(2.0)
    assert abs(solution.step[1]) == pytest.approx(0.5)
    assert abs(solution.step[0]) <= 1e-15


def test_zero_gradient_convex() -> None:
    """Test that a stationary convex model yields the zero step."""
    p = TrsProblem(np.eye(2), np.zeros(2), 1.0, 1.0)
    solution = solve_trs_direct(p)
    assert np.array_equal(solution.step, np.zeros(2))
    assert solution.model_decrease == 0.0


def test_gradient_regularization_shift() -> None:
    """Test that sigma sqrt(||g||) is added to the Hessian."""
    p = TrsProblem(np.zeros((2, 2)), np.array([4.0, 0.0]), 1.0, 10.0)
    assert p.shift == pytest.approx(2.0)
    solution = solve_trs_direct(p)
    assert np.allclose(solution.step, [-2.0, 0.0])
    assert solution.multiplier == 0.0


def test_realized_radius() -> None:
    """Test that the radius scales with the square root of ||g||."""
    assert realized_radius(np.array([3.0, 4.0]), 0.5) == pytest.approx(
        0.5 * np.sqrt(5.0)
    )
    assert realized_radius(np.zeros(2), 0.5) == 0.0
    with pytest.raises(ConfigurationError):
        realized_radius(np.ones(2), 0.0)


def test_invalid_problems() -> None:
    """Test the validation of subproblem data."""
    with pytest.raises(ConfigurationError):
        TrsProblem(np.eye(2), np.ones(2), 0.0, 0.0)
    with pytest.raises(ConfigurationError):
        TrsProblem(np.eye(2), np.ones(2), -1.0, 1.0)
    with pytest.raises(ConfigurationError):
        TrsProblem(np.eye(3), np.ones(2), 0.0, 1.0)
    with pytest.raises(ConfigurationError):
        solve_trs_direct(
            TrsProblem(aslinearoperator(np.eye(2)), np.ones(2), 0.0, 1.0)
        )
    with pytest.raises(ContractViolation):
        solve_trs_direct(
            TrsProblem(np.array([[1.0, 2.0], [0.0, 1.0]]), np.ones(2), 0, 1)
        )


@pytest.mark.parametrize("sigma", SIGMA_GRID)
def test_random_instances_are_certified(sigma: float) -> None:
    """Test the certificate and the dual bound on random instances."""
    rng = np.random.default_rng(2024)
    for _ in range(50):
        drawn = _random_problem(rng)
        p = TrsProblem(drawn.hessian, drawn.gradient, sigma, drawn.radius)
        _assert_certified(p, rng)


def test_constructed_hard_cases() -> None:
    """Test fifty instances with g orthogonal to the leftmost eigenvector."""
    rng = np.random.default_rng(11)
    for _ in range(50):
        p = _hard_case_problem(rng)
        solution = _assert_certified(p, rng)
        mu_min = float(
            np.linalg.eigvalsh(p.hessian + p.shift * np.eye(p.dimension))[0]
        )
        assert solution.hard_case
        assert solution.multiplier == pytest.approx(-mu_min, rel=1e-8)
        assert solution.step_norm == pytest.approx(p.radius, rel=1e-8)


def test_hard_case_completion_values() -> None:
    """Test the completed step of a small indefinite hard case."""
    p = TrsProblem(np.diag([-2.0, 1.0]), np.array([0.0, 1.0]), 0.0, 0.6)
    solution = solve_trs_direct(p)
    tail = np.sqrt(0.36 - 1.0 / 9.0)
    assert tail == pytest.approx(0.49889, abs=1e-5)
    assert solution.hard_case
    assert solution.multiplier == pytest.approx(2.0)
    assert solution.step[1] == pytest.approx(-1.0 / 3.0)
    assert abs(solution.step[0]) == pytest.approx(tail)
    assert model_value(p, solution.step) == pytest.approx(
        _dual_optimum(p), abs=1e-9
    )


@pytest.mark.parametrize("factor", [1e-2, 0.5, 3.0, 1e2])
def test_scaled_model_keeps_step(factor: float) -> None:
    """Test that scaling H and g together leaves the step unchanged."""
    rng = np.random.default_rng(5)
    for _ in range(20):
        drawn = _random_problem(rng)
        p = TrsProblem(drawn.hessian, drawn.gradient, 0.0, drawn.radius)
        scaled = TrsProblem(
            factor * drawn.hessian, factor * drawn.gradient, 0.0, p.radius
        )
        base = solve_trs_direct(p)
        other = solve_trs_direct(scaled)
        assert np.allclose(other.step, base.step, rtol=0.0, atol=1e-8)
        assert other.multiplier == pytest.approx(
            factor * base.multiplier, rel=1e-7, abs=1e-12
        )


@pytest.mark.slow
def test_random_sweep_is_certified() -> None:
    """Test the KKT certificate on a thousand random instances."""
    rng = np.random.default_rng(7)
    for index in range(1000):
        if index % 10 == 0:
            _assert_certified(_hard_case_problem(rng), rng)
        else:
            _assert_certified(_random_problem(rng), rng)
