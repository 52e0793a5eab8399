"""Reference methods: classical trust region and regularized Newton."""

from __future__ import annotations

import logging
import math

from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np
import scipy.linalg

from public import public

from utrx.base import (
    IterationRecord,
    RunClock,
    RunReport,
    RunStatus,
    StepParams,
)
from utrx.errors import ConfigurationError, NumericalError
from utrx.problems.base import ProblemInstance
from utrx.tools.typing import typechecked
from utrx.trs import (
    TrsConfig,
    TrsProblem,
    solve_trs_direct,
    solve_trs_steihaug,
)
from utrx.utr import DEFAULT_MAX_ITER, Subsolver, function_slack

logger = logging.getLogger(__name__)

MAX_HALVINGS = 30

CLASSIC_SUBSOLVERS: Dict[str, Subsolver] = {
    "direct": solve_trs_direct,
    "stcg": solve_trs_steihaug,
}


@public
@dataclass(frozen=True)
class ClassicTrConfig:
    """Radius management of the classical trust-region method."""

    delta0: float = 1.0
    eta_accept: float = 0.1
    shrink: float = 0.25
    grow: float = 2.0
    delta_max: float = 1e6

    def __post_init__(self) -> None:
        if not self.delta0 > 0.0:
            raise ConfigurationError("delta0 must be > 0")
        if not 0.0 < self.eta_accept < 1.0:
            raise ConfigurationError("eta_accept must lie in (0, 1)")
        if not 0.0 < self.shrink < 1.0:
            raise ConfigurationError("shrink must lie in (0, 1)")
        if not self.grow > 1.0:
            raise ConfigurationError("grow must be > 1")
        if not self.delta_max >= self.delta0:
            raise ConfigurationError("delta_max must be >= delta0")


@public
@typechecked
def acceptance_ratio(f0: float, f1: float, model_decrease: float) -> float:
    """Return actual over predicted reduction; ``-inf`` for a bad trial."""
    if not math.isfinite(f1):
        return -math.inf
    actual = f0 - f1
    if model_decrease <= 0.0:
        return 1.0 if actual >= 0.0 else -math.inf
    return actual / model_decrease


def _finish(
    method: str,
    p: ProblemInstance,
    status: RunStatus,
    x: np.ndarray,
    f: float,
    gnorm: float,
    records: List[IterationRecord],
    counters: Dict[str, int],
    clock: RunClock,
    message: str,
) -> RunReport:
    report = RunReport(
        method=method,
        problem=p.name,
        status=status,
        x=x,
        f=float(f),
        grad_norm=gnorm,
        iterations=records,
        counters=counters,
        wall_time=clock.elapsed(),
        message=message,
    )
    logger.info(
        "%s on %s: %s after %d iterations (%s)",
        method,
        p.name,
        status.value,
        len(records),
        counters,
    )
    return report


@public
@typechecked
def classic_tr_minimize(
    p: ProblemInstance,
    cfg: Optional[ClassicTrConfig] = None,
    eps: float = 1e-5,
    max_iter: int = DEFAULT_MAX_ITER,
    subsolver: str = "direct",
    trs_config: Optional[TrsConfig] = None,
    time_limit: Optional[float] = None,
    method: str = "classic_tr",
) -> RunReport:
    """
    Minimize ``p`` with the ratio-test trust-region method.

    The quadratic model is minimized over ``||d|| <= delta`` with the exact
    solver (``"direct"``) or truncated CG (``"stcg"``). A step is accepted
    when the ratio of actual to predicted reduction reaches
    ``eta_accept``. The radius shrinks when the ratio is below 1/4 or the
    step is rejected, and grows when the ratio exceeds 3/4 on the boundary.
    Every iteration is recorded, rejected ones with ``accepted=False``.
    """
    cfg = cfg or ClassicTrConfig()
    if subsolver not in CLASSIC_SUBSOLVERS:
        raise ConfigurationError(
            f"unknown subsolver {subsolver!r}; "
            f"expected {sorted(CLASSIC_SUBSOLVERS)}"
        )
    if not eps > 0.0:
        raise ConfigurationError("eps must be > 0")
    solve = CLASSIC_SUBSOLVERS[subsolver]
    clock = RunClock(time_limit)
    oracle = p.oracle
    start_counts = oracle.counters.snapshot()

    x = p.start.copy()
    f = oracle.value(x)
    g = oracle.gradient(x)
    gnorm = float(np.linalg.norm(g))
    delta = cfg.delta0
    records: List[IterationRecord] = []
    status = RunStatus.MaxIter
    message = "iteration limit"
    if not (np.isfinite(f) and np.isfinite(gnorm)):
        status, message = RunStatus.Failure, "non-finite value at start"

    k = 0
    while status is not RunStatus.Failure:
        if gnorm <= eps:
            status, message = RunStatus.FOSP, "gradient tolerance reached"
            break
        if k >= max_iter:
            break
        if clock.expired():
            message = "time limit"
            break

        if subsolver == "direct":
            hessian = oracle.hessian(x)
            problem = TrsProblem(hessian, g, 0.0, delta)
        else:
            problem = TrsProblem(oracle.hessian_operator(x), g, 0.0, delta)
        try:
            solution = solve(problem, trs_config)
        except NumericalError as exc:
            status, message = RunStatus.Failure, str(exc)
            break
        x_new = x + solution.step
        f_new = math.inf
        if bool(np.all(np.isfinite(x_new))):
            f_new = oracle.value(x_new)
        ratio = acceptance_ratio(f, f_new, solution.model_decrease)
        accepted = ratio >= cfg.eta_accept
        g_new_norm = gnorm
        if accepted:
            g_new = oracle.gradient(x_new)
            g_new_norm = float(np.linalg.norm(g_new))

        on_boundary = solution.step_norm >= (1.0 - 1e-8) * delta
        record = IterationRecord(
            k=k,
            f_before=f,
            f_after=f_new if accepted else f,
            grad_norm_before=gnorm,
            grad_norm_after=g_new_norm,
            lam=solution.multiplier,
            step_norm=solution.step_norm,
            params=StepParams(sigma=0.0, r=delta / math.sqrt(gnorm)),
            flags={"on_boundary": bool(on_boundary)},
            radius=delta,
            ratio=float(ratio) if math.isfinite(ratio) else None,
            accepted=bool(accepted),
            inner_iterations=solution.inner_iterations,
            wall_time=clock.elapsed(),
        )
        records.append(record)

        if ratio < 0.25 or not accepted:
            delta *= cfg.shrink
        elif ratio > 0.75 and on_boundary:
            delta = min(cfg.grow * delta, cfg.delta_max)
        if accepted:
            x, f, g, gnorm = x_new, f_new, g_new, g_new_norm
        logger.debug(
            "k=%d f=%.6e |g|=%.3e ratio=%.3g delta=%.3e accepted=%s",
            k,
            f,
            gnorm,
            ratio,
            delta,
            accepted,
        )
        k += 1

    return _finish(
        method,
        p,
        status,
        x,
        f,
        gnorm,
        records,
        oracle.counters.since(start_counts),
        clock,
        message,
    )


@public
@typechecked
def reg_newton_minimize(
    p: ProblemInstance,
    lam: float = 1e-3,
    power: float = 0.5,
    eps: float = 1e-5,
    max_iter: int = DEFAULT_MAX_ITER,
    time_limit: Optional[float] = None,
    method: str = "reg_newton",
) -> RunReport:
    """
    Gradient-regularized Newton method with a fixed weight.

    Iterates ``x+ = x - t (H + lam ||g||^power I)^{-1} g`` where ``t``
    starts at 1 and is halved, at most ``MAX_HALVINGS`` times, until f does
    not increase. A shifted Hessian that is not positive definite ends the
    run with ``Failure``.
    """
    if not (lam > 0.0 and eps > 0.0):
        raise ConfigurationError("lam and eps must be > 0")
    if power < 0.0:
        raise ConfigurationError("power must be >= 0")
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
    if not (np.isfinite(f) and np.isfinite(gnorm)):
        status, message = RunStatus.Failure, "non-finite value at start"

    k = 0
    while status is not RunStatus.Failure:
        if gnorm <= eps:
            status, message = RunStatus.FOSP, "gradient tolerance reached"
            break
        if k >= max_iter:
            break
        if clock.expired():
            message = "time limit"
            break

        shift = lam * gnorm**power
        shifted = oracle.hessian(x) + shift * np.eye(p.dimension)
        try:
            factor = scipy.linalg.cho_factor(shifted)
        except np.linalg.LinAlgError:
            status = RunStatus.Failure
            message = "shifted Hessian is not positive definite"
            break
        direction = -scipy.linalg.cho_solve(factor, g)

        t = 1.0
        halvings = 0
        while True:
            x_new = x + t * direction
            f_new = oracle.value(x_new)
            if np.isfinite(f_new) and f_new <= f + function_slack(f):
                break
            halvings += 1
            if halvings > MAX_HALVINGS:
                break
            t *= 0.5
        if halvings > MAX_HALVINGS:
            status = RunStatus.Failure
            message = f"no decrease after {MAX_HALVINGS} halvings"
            break

        g_new = oracle.gradient(x_new)
        g_new_norm = float(np.linalg.norm(g_new))
        step_norm = float(np.linalg.norm(x_new - x))
        records.append(
            IterationRecord(
                k=k,
                f_before=f,
                f_after=f_new,
                grad_norm_before=gnorm,
                grad_norm_after=g_new_norm,
                lam=shift,
                step_norm=step_norm,
                params=StepParams(
                    sigma=lam, r=max(step_norm, 1e-300) / math.sqrt(gnorm)
                ),
                retries=halvings,
                wall_time=clock.elapsed(),
            )
        )
        logger.debug(
            "k=%d f=%.6e |g|=%.3e halvings=%d", k, f_new, g_new_norm, halvings
        )
        x, f, g, gnorm = x_new, f_new, g_new, g_new_norm
        k += 1

    return _finish(
        method,
        p,
        status,
        x,
        f,
        gnorm,
        records,
        oracle.counters.since(start_counts),
        clock,
        message,
    )
