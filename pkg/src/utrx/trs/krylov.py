"""Iterative trust-region subproblem solvers based on Hessian products."""

from __future__ import annotations

import logging

from typing import List, Optional

import numpy as np

from public import public

from utrx.base import Vector
from utrx.errors import ConfigurationError
from utrx.tools.typing import typechecked
from utrx.trs.base import TrsConfig, TrsProblem, TrsSolution
from utrx.trs.direct import solve_trs_direct

logger = logging.getLogger(__name__)


@public
@typechecked
def solve_trs_krylov(
    p: TrsProblem, cfg: Optional[TrsConfig] = None
) -> TrsSolution:
    """
    Solve the subproblem on a growing Lanczos subspace.

    The Lanczos basis of ``H~ = H + shift I`` is started from ``g`` and
    kept orthonormal by full reorthogonalization. At each step the
    tridiagonal subproblem ``min ||g|| e1^T y + 1/2 y^T T y, ||y|| <=
    radius`` is solved exactly and the stationarity residual of the lifted
    step, ``beta_{j+1} |y_j|``, is compared with the configured rule.

    A Lanczos breakdown means the subspace is invariant and the lifted step
    is exact; reaching ``krylov_dim_cap`` first returns the current step
    with ``converged=False``.
    """
    cfg = cfg or TrsConfig()
    gnorm = p.gnorm
    if gnorm == 0.0:
        raise ConfigurationError("solve_trs_krylov needs a nonzero gradient")

    n = p.dimension
    cap = min(n, cfg.krylov_dim_cap)
    operator = p.shifted_operator()
    tolerance = cfg.krylov_tolerance(gnorm)

    basis = np.zeros((n, cap))
    alphas: List[float] = []
    betas: List[float] = []
    q = p.gradient / gnorm
    q_prev = np.zeros(n)
    beta_prev = 0.0

    for j in range(cap):
        basis[:, j] = q
        w = np.ravel(operator.matvec(q)).astype(np.float64)
        alpha = float(np.dot(q, w))
        w = w - alpha * q - beta_prev * q_prev
        for _ in range(2):
            w -= basis[:, : j + 1] @ (basis[:, : j + 1].T @ w)
        beta = float(np.linalg.norm(w))
        alphas.append(alpha)

        tridiagonal = (
            np.diag(alphas) + np.diag(betas, 1) + np.diag(betas, -1)
        )
        projected_gradient = np.zeros(j + 1)
        projected_gradient[0] = gnorm
        sub = solve_trs_direct(
            TrsProblem(tridiagonal, projected_gradient, 0.0, p.radius), cfg
        )
        residual = beta * abs(float(sub.step[-1]))
        scale = max(1.0, float(np.max(np.abs(alphas))) + 2.0 * beta)
        breakdown = beta <= 1e-14 * scale
        if residual <= tolerance or breakdown or j + 1 == cap:
            converged = residual <= tolerance or breakdown
            if not converged:
                logger.debug(
                    "krylov cap %d reached, residual %.2e > %.2e",
                    cap,
                    residual,
                    tolerance,
                )
            return TrsSolution(
                step=basis[:, : j + 1] @ sub.step,
                multiplier=sub.multiplier,
                model_decrease=sub.model_decrease,
                on_boundary=sub.on_boundary,
                hard_case=sub.hard_case,
                inner_iterations=j + 1,
                converged=converged,
            )

        betas.append(beta)
        q_prev, q, beta_prev = q, w / beta, beta

    raise AssertionError("unreachable: the loop returns at j + 1 == cap")


def _boundary_step(z: Vector, d: Vector, radius: float) -> float:
    """Return tau >= 0 with ``||z + tau d|| = radius``."""
    a = float(np.dot(d, d))
    b = 2.0 * float(np.dot(z, d))
    c = float(np.dot(z, z)) - radius**2
    return (-b + float(np.sqrt(max(b * b - 4.0 * a * c, 0.0)))) / (2.0 * a)


@public
@typechecked
def solve_trs_steihaug(
    p: TrsProblem, cfg: Optional[TrsConfig] = None
) -> TrsSolution:
    """
    Truncated conjugate gradients for the subproblem.

    CG runs on ``H~ d = -g`` from ``d = 0`` and stops at the boundary, at a
    direction of nonpositive curvature (followed to the boundary), or when
    the residual drops below ``min(0.5, sqrt(||g||)) ||g||``. The multiplier
    of a boundary step is the Rayleigh estimate
    ``-(g^T d + d^T H~ d) / ||d||^2``.
    """
    cfg = cfg or TrsConfig()
    n = p.dimension
    gnorm = p.gnorm
    if gnorm == 0.0:
        return TrsSolution(np.zeros(n), 0.0, 0.0, False)

    operator = p.shifted_operator()
    tolerance = min(0.5, float(np.sqrt(gnorm))) * gnorm
    max_iter = max(n, cfg.krylov_dim_cap)
    z = np.zeros(n)
    residual = p.gradient.copy()
    direction = -residual
    hit_boundary = False
    iterations = 0

    for iterations in range(1, max_iter + 1):
        curved = np.ravel(operator.matvec(direction))
        curvature = float(np.dot(direction, curved))
        if curvature <= 0.0:
            z = z + _boundary_step(z, direction, p.radius) * direction
            hit_boundary = True
            break
        rr = float(np.dot(residual, residual))
        alpha = rr / curvature
        z_next = z + alpha * direction
        if np.linalg.norm(z_next) >= p.radius:
            z = z + _boundary_step(z, direction, p.radius) * direction
            hit_boundary = True
            break
        residual_next = residual + alpha * curved
        z = z_next
        if np.linalg.norm(residual_next) <= tolerance:
            break
        beta = float(np.dot(residual_next, residual_next)) / rr
        direction = -residual_next + beta * direction
        residual = residual_next

    hz = np.ravel(operator.matvec(z))
    model = float(np.dot(p.gradient, z) + 0.5 * np.dot(z, hz))
    multiplier = 0.0
    if hit_boundary:
        multiplier = max(
            0.0,
            -(float(np.dot(p.gradient, z)) + float(np.dot(z, hz)))
            / float(np.dot(z, z)),
        )
    return TrsSolution(
        step=z,
        multiplier=multiplier,
        model_decrease=-model,
        on_boundary=hit_boundary,
        inner_iterations=iterations,
    )
