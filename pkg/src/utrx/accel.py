"""Accelerated universal trust-region method for convex problems."""

from __future__ import annotations

import logging

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from public import public

from utrx.base import (
    IterationRecord,
    Matrix,
    OuterRecord,
    RunClock,
    RunReport,
    RunStatus,
    Vector,
)
from utrx.errors import ConfigurationError
from utrx.problems.base import ObjectiveOracle, ProblemInstance
from utrx.tools.typing import as_float_array, typechecked
from utrx.trs import TrsConfig
from utrx.utr import DEFAULT_MAX_ITER, utr_minimize

logger = logging.getLogger(__name__)

# Lipschitz constant of the Hessian of the cubic generator
BREGMAN_HESSIAN_LIPSCHITZ = 2.0


@public
@typechecked
@dataclass
class CubicBregman:
    """The generator ``d(x) = 1/3 ||x - anchor||^3``."""

    anchor: Vector

    def __post_init__(self) -> None:
        self.anchor = as_float_array(self.anchor)

    def value(self, x: Vector) -> float:
        return float(np.linalg.norm(x - self.anchor) ** 3 / 3.0)

    def gradient(self, x: Vector) -> Vector:
        u = x - self.anchor
        return np.asarray(np.linalg.norm(u) * u, dtype=np.float64)

    def hessian(self, x: Vector) -> Matrix:
        """Return ``||u|| I + u u^T / ||u||``; zero at the anchor."""
        u = x - self.anchor
        norm = float(np.linalg.norm(u))
        if norm == 0.0:
            return np.zeros((u.size, u.size))
        return np.asarray(
            norm * np.eye(u.size) + np.outer(u, u) / norm, dtype=np.float64
        )

    def hessian_vector(self, x: Vector, v: Vector) -> Vector:
        u = x - self.anchor
        norm = float(np.linalg.norm(u))
        if norm == 0.0:
            return np.zeros_like(v)
        return np.asarray(norm * v + u * (np.dot(u, v) / norm))


@public
@typechecked
def bregman_divergence(b: CubicBregman, x: Vector, y: Vector) -> float:
    """Return ``d(y) - d(x) - grad d(x)^T (y - x)``, clipped at zero."""
    if x.shape != y.shape or x.shape != b.anchor.shape:
        raise ConfigurationError("x, y and the anchor must share a shape")
    value = b.value(y) - b.value(x) - float(np.dot(b.gradient(x), y - x))
    # nonnegative in exact arithmetic
    return max(0.0, value)


@public
@typechecked
class ContractedOracle(ObjectiveOracle):
    """
    Oracle of the contracted proximal subproblem.

    ``h(x) = A_next f((a x + A_k x_k) / A_next) + beta_d(v_k; x)`` with
    ``A_k = A_next - a``. Calls are counted on the wrapped oracle's
    counters, once per evaluation of f.
    """

    def __init__(
        self,
        f: ObjectiveOracle,
        a: float,
        A_next: float,  # noqa: N803
        x_k: Vector,
        b: CubicBregman,
        v_k: Vector,
    ) -> None:
        if not (a > 0.0 and A_next >= a):
            raise ConfigurationError("need a > 0 and A_next >= a")
        super().__init__(f.dimension)
        self.f = f
        self.counters = f.counters
        self.a = a
        self.A_next = A_next
        self.A_k = A_next - a
        self.x_k = as_float_array(x_k)
        self.bregman = b
        self.v_k = as_float_array(v_k)
        self.anchor_gradient = b.gradient(self.v_k)

    def contracted_point(self, x: Vector) -> Vector:
        """Return ``z = (a x + A_k x_k) / A_next``."""
        return (self.a * x + self.A_k * self.x_k) / self.A_next

    def value(self, x: Vector) -> float:
        self._check_point(x)
        return self._value(x)

    def gradient(self, x: Vector) -> Vector:
        self._check_point(x)
        return self._gradient(x)

    def hessian(self, x: Vector) -> Matrix:
        self._check_point(x)
        return self._hessian(x)

    def hessian_vector(self, x: Vector, v: Vector) -> Vector:
        self._check_point(x)
        return self._hessian_vector(x, v)

    def _value(self, x: Vector) -> float:
        z = self.contracted_point(x)
        return self.A_next * self.f.value(z) + bregman_divergence(
            self.bregman, self.v_k, x
        )

    def _gradient(self, x: Vector) -> Vector:
        z = self.contracted_point(x)
        return (
            self.a * self.f.gradient(z)
            + self.bregman.gradient(x)
            - self.anchor_gradient
        )

    def _hessian(self, x: Vector) -> Matrix:
        z = self.contracted_point(x)
        hess = self.a**2 / self.A_next * self.f.hessian(z)
        hess = hess + self.bregman.hessian(x)
        return np.asarray(0.5 * (hess + hess.T), dtype=np.float64)

    def _hessian_vector(self, x: Vector, v: Vector) -> Vector:
        z = self.contracted_point(x)
        return (
            self.a**2 / self.A_next * self.f.hessian_vector(z, v)
            + self.bregman.hessian_vector(x, v)
        )


@public
@typechecked
def contracted_oracle(
    f: ObjectiveOracle,
    a: float,
    A_next: float,  # noqa: N803
    x_k: Vector,
    b: CubicBregman,
    v_k: Vector,
) -> ContractedOracle:
    """Build the oracle of ``h_{k+1}``."""
    return ContractedOracle(f, a, A_next, x_k, b, v_k)


@public
@dataclass
class AccelState:
    """Outer state: iterates, estimate-sequence weight and anchor."""

    x: Vector
    v: Vector
    anchor: Vector
    M: float
    k: int = 0
    A: float = 0.0
    weights: List[float] = field(default_factory=list)

    def next_weight(self) -> float:
        """Return ``a_{k+1} = (k+1)^2 / (9 M)``."""
        return (self.k + 1) ** 2 / (9.0 * self.M)

    def advance(self, v: Vector) -> None:
        """Move to ``x_{k+1} = (a v + A_k x_k) / A_{k+1}``."""
        a = self.next_weight()
        A_next = self.A + a  # noqa: N806
        self.x = (a * v + self.A * self.x) / A_next
        self.v = v
        self.A = A_next
        self.weights.append(a)
        self.k += 1


@public
@typechecked
def inner_tolerance(eps: float, k: int) -> float:
    """Return ``delta_k = min(1, eps^{2/3}) / (k + 1)``."""
    return min(1.0, eps ** (2.0 / 3.0)) / (k + 1)


@public
@typechecked
def accel_minimize(
    p: ProblemInstance,
    M: float,
    eps: float = 1e-5,
    max_outer: int = 100,
    f_star: Optional[float] = None,
    use_known_optimum: bool = True,
    max_inner: int = DEFAULT_MAX_ITER,
    subsolver: str = "direct",
    trs_config: Optional[TrsConfig] = None,
    time_limit: Optional[float] = None,
    method: str = "accel",
) -> RunReport:
    """
    Minimize a convex ``p`` with the contracting proximal UTR scheme.

    Each outer step forms ``h_{k+1}`` with ``a_{k+1} = (k+1)^2 / (9M)`` and
    minimizes it with :func:`utr_minimize` in convex mode, started at
    ``v_k``, to gradient accuracy ``inner_tolerance(eps, k)``. The inner
    solver uses ``M_h = a^3 / A^2 M + 2``.

    The run stops with ``Target`` once ``f(x_k) - f* <= eps`` when an
    optimal value is known (``f_star``, or the instance's known optimum
    unless ``use_known_optimum`` is False),
    otherwise with ``FOSP`` once ``||grad f(x_k)|| <= eps``. Inner records
    are concatenated in ``iterations`` and outer records kept in ``outer``.
    """
    if not (M > 0.0 and eps > 0.0):
        raise ConfigurationError("M and eps must be > 0")
    if max_outer < 0:
        raise ConfigurationError("max_outer must be >= 0")
    if not p.convex:
        logger.warning("accelerated method applied to nonconvex %s", p.name)
    clock = RunClock(time_limit)
    oracle = p.oracle
    start_counts = oracle.counters.snapshot()
    target = f_star
    if target is None and use_known_optimum:
        target = p.optimal_value

    state = AccelState(
        x=p.start.copy(), v=p.start.copy(), anchor=p.start.copy(), M=M
    )
    bregman = CubicBregman(p.start)
    f = oracle.value(state.x)
    gnorm = float(np.linalg.norm(oracle.gradient(state.x)))
    inner_records: List[IterationRecord] = []
    outer_records: List[OuterRecord] = []
    status = RunStatus.MaxIter
    message = "iteration limit"

    while True:
        if target is not None:
            if f - target <= eps:
                status, message = RunStatus.Target, "optimality gap reached"
                break
        elif gnorm <= eps:
            status, message = RunStatus.FOSP, "gradient tolerance reached"
            break
        if state.k >= max_outer:
            break
        if clock.expired():
            message = "time limit"
            break

        a = state.next_weight()
        A_next = state.A + a  # noqa: N806
        delta = inner_tolerance(eps, state.k)
        h = contracted_oracle(oracle, a, A_next, state.x, bregman, state.v)
        lipschitz = a**3 / A_next**2 * M + BREGMAN_HESSIAN_LIPSCHITZ
        inner_problem = ProblemInstance(
            name=f"{p.name}/h{state.k}",
            oracle=h,
            start=state.v,
            lipschitz_hint=lipschitz,
            convex=True,
        )
        remaining = None
        if time_limit is not None:
            remaining = max(time_limit - clock.elapsed(), 1e-6)
        inner = utr_minimize(
            inner_problem,
            lipschitz,
            eps=delta,
            max_iter=max_inner,
            convex_mode=True,
            subsolver=subsolver,
            trs_config=trs_config,
            time_limit=remaining,
            method=f"{method}-inner",
        )
        inner_records.extend(inner.iterations)
        if inner.status is not RunStatus.FOSP:
            status = RunStatus.Failure
            message = (
                f"inner solve {state.k} ended with {inner.status.value}: "
                f"{inner.message}"
            )
            break

        state.advance(inner.x)
        f = oracle.value(state.x)
        gnorm = float(np.linalg.norm(oracle.gradient(state.x)))
        outer_records.append(
            OuterRecord(
                k=state.k - 1,
                a=a,
                A=state.A,
                inner_iterations=inner.iteration_count,
                grad_h_norm=inner.grad_norm,
                delta=delta,
                f=f,
                grad_norm=gnorm,
                wall_time=clock.elapsed(),
            )
        )
        logger.debug(
            "outer k=%d a=%.3e A=%.3e inner=%d f=%.6e",
            state.k - 1,
            a,
            state.A,
            inner.iteration_count,
            f,
        )

    report = RunReport(
        method=method,
        problem=p.name,
        status=status,
        x=state.x,
        f=float(f),
        grad_norm=gnorm,
        iterations=inner_records,
        counters=oracle.counters.since(start_counts),
        wall_time=clock.elapsed(),
        message=message,
        outer=outer_records,
    )
    logger.info(
        "%s on %s: %s after %d outer / %d inner iterations",
        method,
        p.name,
        status.value,
        len(outer_records),
        len(inner_records),
    )
    return report

