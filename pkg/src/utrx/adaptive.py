"""Adaptive universal trust-region method with second-order certificates."""

from __future__ import annotations

import logging
import math

from dataclasses import dataclass
from typing import Dict, List, Optional, Union

import numpy as np

from public import public

from utrx.base import (
    IterationRecord,
    RunClock,
    RunReport,
    RunStatus,
    StepClass,
    StepParams,
    Vector,
)
from utrx.errors import ConfigurationError, NumericalError
from utrx.problems.base import ProblemInstance
from utrx.tools.typing import typechecked
from utrx.trs import TrsConfig, TrsProblem, model_value, smallest_eigpair
from utrx.utr import (
    SUBSOLVERS,
    TIE_RTOL,
    function_slack,
    subproblem_hessian,
)

logger = logging.getLogger(__name__)

EIGEN_TOL = 1e-6

NEGATIVE_CURVATURE = "negative_curvature"
POSITIVE_CURVATURE = "positive_curvature"
REGULARIZED = "regularized"
SMALL_GRADIENT = "small_gradient_negative_curvature"
EIGEN_BRANCHES = (NEGATIVE_CURVATURE, SMALL_GRADIENT)


@public
@dataclass(frozen=True)
class AdaptiveConfig:
    """
    Parameters of the adaptive method.

    Attributes
    ----------
    eta : float
        Decrease constant, ``0 < eta < 1/32``.
    xi : float
        Gradient contraction factor, ``1/4 < xi < 1``.
    rho0, rho_min : float
        Initial penalty and its floor, ``rho0 >= rho_min > 0``.
    gamma1 : float
        Penalty increase on a rejected step, ``> 1``.
    gamma2 : float
        Penalty decrease after an accepted step, ``> 1``.
    eps : float
        Target accuracy of the second-order certificate.
    max_outer, max_inner : int
        Accepted-iteration budget and retries allowed per iteration.
    """

    eta: float = 1e-2
    xi: float = 0.3
    rho0: float = 1.0
    rho_min: float = 1e-3
    gamma1: float = 2.0
    gamma2: float = 1.2
    eps: float = 1e-5
    max_outer: int = 10_000
    max_inner: int = 60

    def __post_init__(self) -> None:
        if not 0.0 < self.eta < 1.0 / 32.0:
            raise ConfigurationError(
                f"eta must lie in (0, 1/32), got {self.eta}"
            )
        if not 0.25 < self.xi < 1.0:
            raise ConfigurationError(
                f"xi must lie in (1/4, 1), got {self.xi}"
            )
        if not self.rho_min > 0.0:
            raise ConfigurationError("rho_min must be > 0")
        if not self.rho0 >= self.rho_min:
            raise ConfigurationError("rho0 must be >= rho_min")
        if not (self.gamma1 > 1.0 and self.gamma2 > 1.0):
            raise ConfigurationError("gamma1 and gamma2 must be > 1")
        if not self.eps > 0.0:
            raise ConfigurationError("eps must be > 0")
        if self.max_outer < 0 or self.max_inner < 1:
            raise ConfigurationError(
                "max_outer must be >= 0 and max_inner >= 1"
            )


@public
@dataclass(frozen=True)
class Terminate:
    """The current point is certified as an approximate SOSP."""

    certificate: Dict[str, float]


@public
@dataclass(frozen=True)
class Step:
    """Subproblem parameters chosen by the adaptive strategy."""

    sigma: float
    radius: float
    branch: str

    def __post_init__(self) -> None:
        if not self.radius > 0.0:
            raise ConfigurationError(
                f"radius must be > 0, got {self.radius}"
            )


@public
@typechecked
def sosp_certificate(
    gnorm: float, lambda_min: float, rho: float, eps: float
) -> bool:
    """Return whether ``gnorm <= eps`` and ``lambda_min > -rho sqrt(eps)``."""
    return bool(gnorm <= eps and lambda_min > -rho * math.sqrt(eps))


@public
@typechecked
def select_params(
    lambda_min: float, gnorm: float, rho: float, eps: float
) -> Union[Terminate, Step]:
    """
    Choose ``(sigma, radius)`` from the curvature and the gradient norm.

    With ``t = rho sqrt(||g||)``:

    * ``||g|| >= eps`` and ``|lambda_min| >= t``: ``sigma = 0``,
      ``radius = sqrt(||g||) / (2 rho)``;
    * ``||g|| >= eps`` and ``|lambda_min| < t``: ``sigma = rho``,
      ``radius = sqrt(||g||) / (4 rho)``;
    * ``||g|| < eps`` and ``lambda_min > -rho sqrt(eps)``: terminate;
    * ``||g|| < eps`` otherwise: ``sigma = 0``,
      ``radius = sqrt(eps) / (2 rho)``.

    The radius is returned already multiplied by the gradient scale, so a
    vanishing gradient needs no special case.
    """
    if not (rho > 0.0 and eps > 0.0 and gnorm >= 0.0):
        raise ConfigurationError("need rho > 0, eps > 0 and gnorm >= 0")
    if gnorm >= eps:
        root = math.sqrt(gnorm)
        threshold = rho * root
        if lambda_min <= -threshold:
            return Step(0.0, root / (2.0 * rho), NEGATIVE_CURVATURE)
        if lambda_min >= threshold:
            return Step(0.0, root / (2.0 * rho), POSITIVE_CURVATURE)
        return Step(rho, root / (4.0 * rho), REGULARIZED)
    if lambda_min > -rho * math.sqrt(eps):
        return Terminate(
            {
                "grad_norm": float(gnorm),
                "lambda_min": float(lambda_min),
                "rho": float(rho),
                "eps": float(eps),
            }
        )
    return Step(0.0, math.sqrt(eps) / (2.0 * rho), SMALL_GRADIENT)


@public
@typechecked
def check_modified_decrease(
    f0: float,
    f1: float,
    g0norm: float,
    g1norm: float,
    rho: float,
    cfg: AdaptiveConfig,
) -> bool:
    """
    Return whether a step meets the adaptive decrease law.

    Above ``eps`` the step must lower f by ``(eta/rho) ||g0||^{3/2}`` or
    contract the gradient by ``xi``; below ``eps`` only the decrease
    ``(eta/rho) eps^{3/2}`` counts. Monotonicity is tested separately.
    """
    if not rho > 0.0:
        raise ConfigurationError(f"rho must be > 0, got {rho}")
    slack = function_slack(f0)
    if g0norm >= cfg.eps:
        return bool(
            f1 - f0 <= -(cfg.eta / rho) * g0norm**1.5 + slack
            or g1norm <= cfg.xi * g0norm * (1.0 + TIE_RTOL)
        )
    return bool(f1 - f0 <= -(cfg.eta / rho) * cfg.eps**1.5 + slack)


@public
@typechecked
def rho_max_bound(M: float, cfg: AdaptiveConfig) -> float:
    """Return the uniform upper bound on the penalty for Lipschitz M."""
    if not M > 0.0:
        raise ConfigurationError(f"M must be > 0, got {M}")
    terms = (
        M / (12.0 * (1.0 - 32.0 * cfg.eta)),
        M / (6.0 * (1.0 - 8.0 * cfg.eta)),
        M / (32.0 * cfg.xi - 8.0),
        M / (8.0 * cfg.xi),
    )
    return cfg.gamma1 * math.sqrt(max(terms))


@public
@typechecked
def eigenpoint(g: Vector, v: Vector, radius: float) -> Vector:
    """Return ``radius * v`` signed so that it does not ascend along g."""
    unit = v / np.linalg.norm(v)
    sign = -1.0 if float(np.dot(g, unit)) > 0.0 else 1.0
    return np.asarray(sign * radius * unit, dtype=np.float64)


@public
@typechecked
def autr_minimize(
    p: ProblemInstance,
    cfg: Optional[AdaptiveConfig] = None,
    subsolver: str = "direct",
    trs_config: Optional[TrsConfig] = None,
    time_limit: Optional[float] = None,
    convex_mode: bool = False,
    method: str = "autr",
    seed: int = 0,
) -> RunReport:
    """
    Minimize ``p`` with the adaptive universal trust-region method.

    The smallest Hessian eigenvalue is computed once per iteration. The
    inner loop picks ``(sigma, radius)`` with :func:`select_params`, solves
    the subproblem and accepts the step when f does not increase and
    :func:`check_modified_decrease` holds; otherwise rho is multiplied by
    ``gamma1``. After acceptance ``rho = max(rho_min, rho / gamma2)``.
    ``seed`` fixes the Lanczos start of the eigenvalue estimate.

    Returns
    -------
    RunReport
        ``SOSP`` with ``certificate`` on success, ``MaxIter`` when the
        iteration or time budget ran out, ``Failure`` when ``max_inner``
        retries did not produce an acceptable step or a value was not
        finite.
    """
    cfg = cfg or AdaptiveConfig()
    if subsolver not in SUBSOLVERS:
        raise ConfigurationError(
            f"unknown subsolver {subsolver!r}; expected {sorted(SUBSOLVERS)}"
        )
    solve = SUBSOLVERS[subsolver]
    clock = RunClock(time_limit)
    oracle = p.oracle
    start_counts = oracle.counters.snapshot()

    x = p.start.copy()
    f = oracle.value(x)
    g = oracle.gradient(x)
    gnorm = float(np.linalg.norm(g))
    rho = cfg.rho0
    records: List[IterationRecord] = []
    certificate: Optional[Dict[str, float]] = None
    status = RunStatus.MaxIter
    message = "iteration limit"
    if not (np.isfinite(f) and np.isfinite(gnorm)):
        status, message = RunStatus.Failure, "non-finite value at start"

    k = 0
    while status is not RunStatus.Failure:
        if k >= cfg.max_outer:
            break
        if clock.expired():
            message = "time limit"
            break
        hessian = subproblem_hessian(oracle, x, subsolver)
        try:
            value, direction = smallest_eigpair(
                hessian, tol=EIGEN_TOL, seed=seed
            )
        except NumericalError as exc:
            status, message = RunStatus.Failure, str(exc)
            break

        lambda_min = float(value)
        retries = 0
        decision: Union[Terminate, Step]
        while True:
            decision = select_params(lambda_min, gnorm, rho, cfg.eps)
            if isinstance(decision, Terminate):
                break
            problem = TrsProblem(hessian, g, decision.sigma, decision.radius)
            if gnorm == 0.0:
                step = eigenpoint(g, direction, decision.radius)
                multiplier = max(0.0, -lambda_min)
                inner = 0
            else:
                try:
                    solution = solve(problem, trs_config)
                except NumericalError as exc:
                    status, message = RunStatus.Failure, str(exc)
                    break
                step = solution.step
                multiplier = solution.multiplier
                inner = solution.inner_iterations
                if subsolver != "direct" and decision.branch in EIGEN_BRANCHES:
                    candidate = eigenpoint(g, direction, decision.radius)
                    if model_value(problem, candidate) < model_value(
                        problem, step
                    ):
                        step = candidate
                        multiplier = max(0.0, -lambda_min)

            x_new = x + step
            if not bool(np.all(np.isfinite(x_new))):
                status, message = RunStatus.Failure, "non-finite trial point"
                break
            f_new = oracle.value(x_new)
            g_new = oracle.gradient(x_new)
            g_new_norm = float(np.linalg.norm(g_new))
            if not (np.isfinite(f_new) and np.isfinite(g_new_norm)):
                status, message = RunStatus.Failure, "non-finite value"
                break
            monotone = f_new <= f + function_slack(f)
            if monotone and check_modified_decrease(
                f, f_new, gnorm, g_new_norm, rho, cfg
            ):
                break
            retries += 1
            if retries > cfg.max_inner:
                status = RunStatus.Failure
                message = f"no acceptable step after {cfg.max_inner} retries"
                break
            rho *= cfg.gamma1
            logger.debug(
                "k=%d rejected on %s, rho raised to %g",
                k,
                decision.branch,
                rho,
            )

        if status is RunStatus.Failure:
            break
        if isinstance(decision, Terminate):
            status = RunStatus.SOSP
            message = "second-order certificate"
            certificate = decision.certificate
            break

        scale = max(gnorm, cfg.eps)
        threshold = (cfg.eta / rho) * scale**1.5
        slack = function_slack(f)
        growth_ok = bool(g_new_norm <= gnorm / cfg.xi * (1.0 + TIE_RTOL))
        if convex_mode and not growth_ok:
            logger.warning(
                "k=%d gradient grew from %.3e to %.3e", k, gnorm, g_new_norm
            )
        flags = {
            "monotone": True,
            "modified_decrease": True,
            "growth_bound": growth_ok,
        }
        if decision.branch in EIGEN_BRANCHES:
            flags["eigen_decrease"] = bool(f_new - f <= -threshold + slack)
        record = IterationRecord(
            k=k,
            f_before=f,
            f_after=f_new,
            grad_norm_before=gnorm,
            grad_norm_after=g_new_norm,
            lam=float(multiplier),
            step_norm=float(np.linalg.norm(step)),
            params=StepParams(
                sigma=decision.sigma,
                r=decision.radius / math.sqrt(scale),
                rho=rho,
            ),
            classification=(
                StepClass.F if f_new - f <= -threshold + slack else StepClass.G
            ),
            flags=flags,
            retries=retries,
            radius=decision.radius,
            lambda_min=lambda_min,
            branch=decision.branch,
            inner_iterations=inner,
            wall_time=clock.elapsed(),
        )
        records.append(record)
        logger.debug(
            "k=%d f=%.6e |g|=%.3e lam=%.3e rho=%.3e branch=%s retries=%d",
            k,
            f_new,
            g_new_norm,
            multiplier,
            rho,
            decision.branch,
            retries,
        )
        x, f, g, gnorm = x_new, f_new, g_new, g_new_norm
        rho = max(cfg.rho_min, rho / cfg.gamma2)
        k += 1

    report = RunReport(
        method=method,
        problem=p.name,
        status=status,
        x=x,
        f=float(f),
        grad_norm=gnorm,
        iterations=records,
        counters=oracle.counters.since(start_counts),
        wall_time=clock.elapsed(),
        message=message,
        certificate=certificate,
    )
    logger.info(
        "%s on %s: %s after %d iterations (%s)",
        method,
        p.name,
        status.value,
        len(records),
        report.counters,
    )
    return report


@public
@typechecked
def reference_minimum(p: ProblemInstance, eps: float = 1e-12) -> float:
    """
    Return a high-accuracy estimate of ``min f`` for a convex instance.

    The known optimum is used when the instance has one.
    """
    if p.optimal_value is not None:
        return p.optimal_value
    report = autr_minimize(
        p, AdaptiveConfig(eps=eps), method="reference"
    )
    if report.status is RunStatus.Failure:
        logger.warning(
            "reference run on %s failed: %s", p.name, report.message
        )
    return report.f
