"""Tests for the classical trust-region and regularized Newton baselines."""

from __future__ import annotations

import math

import numpy as np
import pytest

from utrx.base import RunStatus
from utrx.baselines import (
    ClassicTrConfig,
    acceptance_ratio,
    classic_tr_minimize,
    reg_newton_minimize,
)
from utrx.errors import ConfigurationError
from utrx.problems import ConvexQuadratic, ProblemInstance
from utrx.problems.suite import get_problem
from utrx.utr import utr_minimize


@pytest.mark.parametrize(
    "f0,f1,decrease,expected",
    [
        (1.0, 0.5, 0.5, 1.0),
        (1.0, 0.75, 0.5, 0.5),
        (1.0, 1.0, 0.0, 1.0),
        (1.0, 2.0, 0.0, -math.inf),
        (1.0, 2.0, 0.5, -2.0),
    ],
)
def test_acceptance_ratio(
    f0: float, f1: float, decrease: float, expected: float
) -> None:
    """Test the actual over predicted reduction."""
    assert acceptance_ratio(f0, f1, decrease) == expected


def test_acceptance_ratio_non_finite_trial() -> None:
    """Test that a non-finite trial value is never accepted."""
    assert acceptance_ratio(1.0, math.nan, 0.5) == -math.inf
    assert acceptance_ratio(1.0, math.inf, 0.5) == -math.inf


def test_classic_tr_newton_step_on_quadratic() -> None:
    """Test that a huge radius gives one exact Newton step."""
    problem = get_problem("quadratic_2")
    report = classic_tr_minimize(problem, ClassicTrConfig(delta0=1e6))
    assert report.status is RunStatus.FOSP
    assert report.iteration_count == 1
    record = report.iterations[0]
    assert record.accepted
    assert record.ratio == pytest.approx(1.0)
    assert not record.flags["on_boundary"]
    assert np.allclose(report.x, 0.0)


@pytest.mark.parametrize("subsolver", ["direct", "stcg"])
def test_classic_tr_rosenbrock(subsolver: str) -> None:
    """Test convergence on Rosenbrock with both subproblem solvers."""
    problem = get_problem("rosenbrock_2")
    report = classic_tr_minimize(problem, subsolver=subsolver)
    assert report.status is RunStatus.FOSP
    assert report.grad_norm <= 1e-5
    assert np.allclose(report.x, 1.0, atol=1e-4)
    for record in report.iterations:
        assert record.radius is not None
        if not record.accepted:
            assert record.f_after == record.f_before
        else:
            assert record.f_after <= record.f_before


def test_classic_tr_radius_shrinks_after_rejection() -> None:
    """Test the radius update after a rejected step."""
    problem = get_problem("rosenbrock_2")
    cfg = ClassicTrConfig(delta0=10.0, delta_max=100.0)
    report = classic_tr_minimize(problem, cfg)
    records = report.iterations
    for before, after in zip(records, records[1:]):
        assert before.radius is not None
        assert after.radius is not None
        if not before.accepted:
            assert after.radius == pytest.approx(cfg.shrink * before.radius)
        assert after.radius <= cfg.delta_max


def test_classic_tr_validation() -> None:
    """Test the configuration checks of the classical method."""
    with pytest.raises(ConfigurationError):
        ClassicTrConfig(delta0=0.0)
    with pytest.raises(ConfigurationError):
        ClassicTrConfig(eta_accept=1.0)
    with pytest.raises(ConfigurationError):
        ClassicTrConfig(shrink=1.5)
    with pytest.raises(ConfigurationError):
        ClassicTrConfig(grow=1.0)
    with pytest.raises(ConfigurationError):
        ClassicTrConfig(delta0=10.0, delta_max=1.0)
    problem = get_problem("quadratic_2")
    with pytest.raises(ConfigurationError):
        classic_tr_minimize(problem, subsolver="krylov")
    with pytest.raises(ConfigurationError):
        classic_tr_minimize(problem, eps=0.0)


def test_reg_newton_single_step() -> None:
    """Test one regularized Newton step on a quadratic."""
    problem = ProblemInstance(
        name="unit_quadratic",
        oracle=ConvexQuadratic(np.ones(2)),
        start=np.array([1.0, 0.0]),
        convex=True,
    )
    report = reg_newton_minimize(problem, lam=1.0, max_iter=1)
    assert report.status is RunStatus.MaxIter
    assert np.allclose(report.x, [0.5, 0.0])
    record = report.iterations[0]
    assert record.lam == pytest.approx(1.0)
    assert record.retries == 0


def test_reg_newton_logistic() -> None:
    """Test convergence on a convex logistic problem."""
    report = reg_newton_minimize(get_problem("logistic_200x20"))
    assert report.status is RunStatus.FOSP
    assert report.grad_norm <= 1e-5
    values = [rec.f_after for rec in report.iterations]
    assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))


def test_reg_newton_fails_on_negative_curvature() -> None:
    """Test the failure on an indefinite shifted Hessian."""
    report = reg_newton_minimize(get_problem("quartic_saddle_4"))
    assert report.status is RunStatus.Failure
    assert report.message == "shifted Hessian is not positive definite"
    assert report.iteration_count == 0


def test_reg_newton_validation() -> None:
    """Test the argument checks of the regularized Newton method."""
    problem = get_problem("quadratic_2")
    with pytest.raises(ConfigurationError):
        reg_newton_minimize(problem, lam=0.0)
    with pytest.raises(ConfigurationError):
        reg_newton_minimize(problem, power=-1.0)


def test_reports_share_one_layout() -> None:
    """Test that baseline reports serialize like UTR reports."""
    utr = utr_minimize(get_problem("quadratic_2"), 1.0).to_dict()
    for report in (
        classic_tr_minimize(get_problem("quadratic_2")),
        reg_newton_minimize(get_problem("quadratic_2")),
    ):
        data = report.to_dict()
        assert set(data) == set(utr)
        assert data["status"] == "FOSP"
