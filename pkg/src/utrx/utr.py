"""Universal trust-region method with the fixed (simple) strategy."""

from __future__ import annotations

import logging

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, List, Optional, Union

import numpy as np

from public import public
from scipy.sparse.linalg import LinearOperator

from utrx.base import (
    IterationRecord,
    RunClock,
    RunReport,
    RunStatus,
    StepClass,
    StepParams,
    Vector,
)
from utrx.errors import ConfigurationError, ContractViolation, NumericalError
from utrx.problems.base import ObjectiveOracle, ProblemInstance
from utrx.tools.typing import typechecked
from utrx.trs import (
    TrsConfig,
    TrsProblem,
    TrsSolution,
    realized_radius,
    solve_trs_direct,
    solve_trs_krylov,
)

logger = logging.getLogger(__name__)

MAX_DOUBLINGS = 50
DEFAULT_MAX_ITER = 10_000

# comparisons of computed quantities allow a few ulps of roundoff
TIE_RTOL = 4.0 * float(np.finfo(np.float64).eps)

Subsolver = Callable[[TrsProblem, Optional[TrsConfig]], TrsSolution]

SUBSOLVERS: Dict[str, Subsolver] = {
    "direct": solve_trs_direct,
    "krylov": solve_trs_krylov,
}


@public
def subproblem_hessian(
    oracle: ObjectiveOracle, x: Vector, subsolver: str
) -> Union[np.ndarray, LinearOperator]:
    """Return the Hessian in the form ``subsolver`` consumes."""
    if subsolver not in SUBSOLVERS:
        raise ConfigurationError(
            f"unknown subsolver {subsolver!r}; expected {sorted(SUBSOLVERS)}"
        )
    if subsolver == "direct":
        return oracle.hessian(x)
    return oracle.hessian_operator(x)


def function_slack(f0: float) -> float:
    return TIE_RTOL * max(1.0, abs(f0))


@public
class ConditionOutcome(Enum):
    """Result of the acceptance test of a trial step."""

    MonotoneOnly = "MonotoneOnly"
    FDecrease = "FDecrease"
    GContract = "GContract"
    Reject = "Reject"


@public
@dataclass(frozen=True)
class SimpleConstants:
    """
    Constants of the acceptance law under the simple strategy.

    An accepted step either lowers f by ``kappa / sqrt(M) ||g||^{3/2}`` or
    contracts the gradient norm by ``xi``.
    """

    M: float
    kappa: float = 1.0 / 81.0
    xi: float = 1.0 / 6.0

    def __post_init__(self) -> None:
        if not self.M > 0:
            raise ConfigurationError(f"M must be > 0, got {self.M}")
        if not self.kappa > 0:
            raise ConfigurationError("kappa must be > 0")
        if not 0 < self.xi < 1:
            raise ConfigurationError("xi must lie in (0, 1)")

    def decrease_threshold(self, gnorm: float) -> float:
        """Return the required drop ``kappa / sqrt(M) * gnorm^{3/2}``."""
        return self.kappa / float(np.sqrt(self.M)) * gnorm**1.5


@public
@typechecked
def simple_strategy(M: float) -> StepParams:
    """Return ``(sigma, r) = (sqrt(M)/3, 1/(3 sqrt(M)))``."""
    if not M > 0:
        raise ConfigurationError(f"M must be > 0, got {M}")
    root = float(np.sqrt(M))
    return StepParams(sigma=root / 3.0, r=1.0 / (3.0 * root))


@public
@dataclass(frozen=True)
class PrincipleCheck:
    """Decrease and contraction coefficients of a ``(sigma, r)`` pair."""

    decrease_coefficient: float
    contraction_coefficient: float
    decrease_ok: bool
    contraction_ok: bool


@public
@typechecked
def posterior_principle(
    sigma: float,
    r: float,
    M: float,
    lam: float = 0.0,
    gnorm: float = 1.0,
    kappa: float = 1.0 / 81.0,
    xi: float = 1.0 / 6.0,
) -> PrincipleCheck:
    """
    Evaluate the two design inequalities of a parameter pair.

    A boundary step of length ``r sqrt(||g||)`` lowers f by at least
    ``(lam / (2 r sqrt(||g||)) + sigma / (2 r) - M / 6) r^3 ||g||^{3/2}``;
    an interior step (``lam = 0``) leaves a gradient of norm at most
    ``(M/2 r^2 + sigma r) ||g||``. The pair is admissible when the first
    coefficient reaches ``kappa / sqrt(M)`` or the second stays below
    ``xi``.
    """
    if not (r > 0 and M > 0 and gnorm > 0):
        raise ConfigurationError("r, M and gnorm must be > 0")
    decrease = (
        lam / (2.0 * r * np.sqrt(gnorm)) + sigma / (2.0 * r) - M / 6.0
    ) * r**3
    contraction = M / 2.0 * r**2 + sigma * r
    target = kappa / np.sqrt(M)
    return PrincipleCheck(
        decrease_coefficient=float(decrease),
        contraction_coefficient=float(contraction),
        decrease_ok=bool(decrease >= target * (1.0 - 1e-12)),
        contraction_ok=bool(contraction <= xi * (1.0 + 1e-12)),
    )


@public
@typechecked
def check_conditions(
    f0: float,
    f1: float,
    g0norm: float,
    g1norm: float,
    c: SimpleConstants,
    convex_mode: bool = False,
) -> ConditionOutcome:
    """
    Classify a trial step against the acceptance conditions.

    ``Reject`` when f increases, or, in convex mode, when the gradient
    grows beyond ``||g0|| / xi``. Otherwise ``FDecrease`` when f dropped by
    the required amount (ties included), ``GContract`` when
    ``||g1|| <= xi ||g0||``, and ``MonotoneOnly`` when neither holds.
    """
    if not g0norm > 0:
        raise ConfigurationError("g0norm must be > 0")
    slack = function_slack(f0)
    if f1 > f0 + slack:
        return ConditionOutcome.Reject
    if convex_mode and g1norm > g0norm / c.xi * (1.0 + TIE_RTOL):
        return ConditionOutcome.Reject
    if f1 - f0 <= -c.decrease_threshold(g0norm) + slack:
        return ConditionOutcome.FDecrease
    if g1norm <= c.xi * g0norm * (1.0 + TIE_RTOL):
        return ConditionOutcome.GContract
    return ConditionOutcome.MonotoneOnly


@public
@typechecked
def classify_iteration(rec: IterationRecord, c: SimpleConstants) -> StepClass:
    """
    Label an accepted iteration as F-set or G-set.

    Raises
    ------
    ContractViolation
        Neither the decrease nor the contraction branch holds.
    """
    slack = function_slack(rec.f_before)
    drop = rec.f_after - rec.f_before
    if drop <= -c.decrease_threshold(rec.grad_norm_before) + slack:
        return StepClass.F
    if rec.grad_norm_after <= c.xi * rec.grad_norm_before * (1 + TIE_RTOL):
        return StepClass.G
    raise ContractViolation(
        f"iteration {rec.k} neither decreased f by "
        f"{c.decrease_threshold(rec.grad_norm_before):.3e} nor contracted "
        f"the gradient by {c.xi:.3f}"
    )


def estimate_flags(
    f0: float,
    f1: float,
    g0norm: float,
    g1norm: float,
    solution: TrsSolution,
    params: StepParams,
    M: float,
) -> Dict[str, bool]:
    """Check the per-step decrease and gradient estimates."""
    step_norm = solution.step_norm
    coefficient = (
        solution.multiplier / (2.0 * params.r * np.sqrt(g0norm))
        + params.sigma / (2.0 * params.r)
        - M / 6.0
    )
    flags = {
        "decrease_estimate": bool(
            f1 <= f0 - coefficient * step_norm**3 + function_slack(f0)
        )
    }
    if solution.multiplier == 0.0:
        contraction = M / 2.0 * params.r**2 + params.sigma * params.r
        flags["gradient_estimate"] = bool(
            g1norm <= contraction * g0norm * (1.0 + 1e-10)
        )
    return flags


def _validate(eps: float, max_iter: int, subsolver: str) -> None:
    if not eps > 0:
        raise ConfigurationError(f"eps must be > 0, got {eps}")
    if max_iter < 0:
        raise ConfigurationError("max_iter must be >= 0")
    if subsolver not in SUBSOLVERS:
        raise ConfigurationError(
            f"unknown subsolver {subsolver!r}; expected {sorted(SUBSOLVERS)}"
        )


@public
@typechecked
def utr_minimize(
    p: ProblemInstance,
    M: float,
    eps: float = 1e-5,
    max_iter: int = DEFAULT_MAX_ITER,
    convex_mode: bool = False,
    subsolver: str = "direct",
    trs_config: Optional[TrsConfig] = None,
    time_limit: Optional[float] = None,
    method: str = "utr",
) -> RunReport:
    """
    Minimize ``p`` with the universal trust-region method.

    Each iteration solves the gradient-regularized subproblem with
    ``(sigma, r) = simple_strategy(M)`` and accepts the step when it lowers
    f and meets the decrease-or-contraction law. A rejected step doubles M
    and re-solves, at most ``MAX_DOUBLINGS`` times per iteration; the
    doubled M is kept for the rest of the run.

    Parameters
    ----------
    p : ProblemInstance
        Problem and starting point.
    M : float
        Lipschitz constant of the Hessian, or a positive initial guess.
    eps : float
        Gradient-norm tolerance of the first-order stopping test.
    max_iter : int
        Iteration budget.
    convex_mode : bool
        Reject steps that grow the gradient beyond ``||g|| / xi``; outside
        convex mode such steps are only logged.
    subsolver : {"direct", "krylov"}
        Exact dense solver or Lanczos solver on Hessian products.
    trs_config : TrsConfig, optional
        Subproblem tolerances.
    time_limit : float, optional
        Wall-clock budget in seconds.
    method : str
        Label stored in the report.

    Returns
    -------
    RunReport
        ``FOSP`` on success, ``MaxIter`` when a budget ran out, ``Failure``
        on non-finite values or exhausted doublings.
    """
    if not M > 0:
        raise ConfigurationError(f"M must be > 0, got {M}")
    _validate(eps, max_iter, subsolver)
    solve = SUBSOLVERS[subsolver]
    clock = RunClock(time_limit)
    oracle = p.oracle
    start_counts = oracle.counters.snapshot()

    x = p.start.copy()
    f = oracle.value(x)
    g = oracle.gradient(x)
    gnorm = float(np.linalg.norm(g))
    records: List[IterationRecord] = []
    status = RunStatus.MaxIter
    message = "iteration limit"
    current_m = M

    if not (np.isfinite(f) and np.isfinite(gnorm)):
        status, message = RunStatus.Failure, "non-finite value at start"
        max_iter = 0

    k = 0
    while True:
        if status is RunStatus.Failure:
            break
        if gnorm <= eps:
            status, message = RunStatus.FOSP, "gradient tolerance reached"
            break
        if k >= max_iter:
            break
        if clock.expired():
            message = "time limit"
            break

        hessian = subproblem_hessian(oracle, x, subsolver)
        retries = 0
        while True:
            constants = SimpleConstants(current_m)
            params = simple_strategy(current_m)
            radius = realized_radius(g, params.r)
            try:
                solution = solve(
                    TrsProblem(hessian, g, params.sigma, radius), trs_config
                )
            except NumericalError as exc:
                status, message = RunStatus.Failure, str(exc)
                break
            x_new = x + solution.step
            if not bool(np.all(np.isfinite(x_new))):
                status, message = RunStatus.Failure, "non-finite trial point"
                break
            f_new = oracle.value(x_new)
            g_new = oracle.gradient(x_new)
            g_new_norm = float(np.linalg.norm(g_new))
            if not (np.isfinite(f_new) and np.isfinite(g_new_norm)):
                status, message = RunStatus.Failure, "non-finite value"
                break
            outcome = check_conditions(
                f, f_new, gnorm, g_new_norm, constants, convex_mode
            )
            if outcome in (
                ConditionOutcome.FDecrease,
                ConditionOutcome.GContract,
            ):
                break
            retries += 1
            if retries > MAX_DOUBLINGS:
                status = RunStatus.Failure
                message = f"no acceptable step after {MAX_DOUBLINGS} doublings"
                break
            current_m *= 2.0
            logger.debug(
                "k=%d rejected (%s), M doubled to %g",
                k,
                outcome.value,
                current_m,
            )
        if status is RunStatus.Failure:
            break

        growth_ok = g_new_norm <= gnorm / constants.xi * (1.0 + TIE_RTOL)
        if not growth_ok:
            logger.warning(
                "k=%d gradient grew from %.3e to %.3e", k, gnorm, g_new_norm
            )
        flags = {
            "monotone": True,
            "f_decrease": outcome is ConditionOutcome.FDecrease,
            "g_contract": bool(
                g_new_norm <= constants.xi * gnorm * (1.0 + TIE_RTOL)
            ),
            "growth_bound": bool(growth_ok),
        }
        flags.update(
            estimate_flags(
                f, f_new, gnorm, g_new_norm, solution, params, current_m
            )
        )
        record = IterationRecord(
            k=k,
            f_before=f,
            f_after=f_new,
            grad_norm_before=gnorm,
            grad_norm_after=g_new_norm,
            lam=solution.multiplier,
            step_norm=solution.step_norm,
            params=params,
            flags=flags,
            retries=retries,
            radius=radius,
            lipschitz=current_m,
            inner_iterations=solution.inner_iterations,
            wall_time=clock.elapsed(),
        )
        record.classification = classify_iteration(record, constants)
        records.append(record)
        logger.debug(
            "k=%d f=%.6e |g|=%.3e lam=%.3e class=%s retries=%d",
            k,
            f_new,
            g_new_norm,
            solution.multiplier,
            record.classification.value,
            retries,
        )
        x, f, g, gnorm = x_new, f_new, g_new, g_new_norm
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
