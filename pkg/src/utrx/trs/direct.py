"""Exact trust-region subproblem solver for dense Hessians."""

from __future__ import annotations

import logging

from typing import Optional

import numpy as np
import scipy.linalg

from public import public

from utrx.base import Matrix, Vector
from utrx.errors import ConfigurationError, NumericalError
from utrx.problems.base import check_symmetric
from utrx.tools.typing import typechecked
from utrx.trs.base import TrsConfig, TrsProblem, TrsSolution
from utrx.trs.eigen import SYMMETRY_RTOL

logger = logging.getLogger(__name__)


def _solution(
    p: TrsProblem,
    shifted: Matrix,
    step: Vector,
    multiplier: float,
    hard_case: bool,
    inner_iterations: int,
) -> TrsSolution:
    model = float(
        np.dot(p.gradient, step) + 0.5 * np.dot(step, shifted @ step)
    )
    return TrsSolution(
        step=step,
        multiplier=multiplier,
        model_decrease=-model,
        on_boundary=multiplier > 0.0,
        hard_case=hard_case,
        inner_iterations=inner_iterations,
    )


@public
@typechecked
def solve_trs_direct(
    p: TrsProblem, cfg: Optional[TrsConfig] = None
) -> TrsSolution:
    """
    Solve the subproblem exactly through an eigendecomposition.

    With ``H~ = H + sigma sqrt(||g||) I = Q diag(mu) Q^T`` the step is
    ``d(lambda) = -Q diag(1 / (mu + lambda)) Q^T g``. The interior Newton
    step is returned when ``H~`` is positive definite and the step fits;
    otherwise the secular equation ``1/||d(lambda)|| = 1/radius`` is solved
    by Newton's method safeguarded by bisection on
    ``[max(0, -mu_min), ||g||/radius + ||H~||]``. In the hard case the
    leftmost eigenvector completes the step to the boundary with the sign
    giving the lower model value.

    Raises
    ------
    ConfigurationError
        The Hessian is not a dense array.
    ContractViolation
        The Hessian is not symmetric.
    NumericalError
        The secular equation was not solved within ``max_root_iters``.
    """
    cfg = cfg or TrsConfig()
    if not isinstance(p.hessian, np.ndarray):
        raise ConfigurationError("solve_trs_direct needs a dense Hessian")
    check_symmetric(p.hessian, rtol=SYMMETRY_RTOL)

    n = p.dimension
    g = p.gradient
    gnorm = p.gnorm
    radius = p.radius
    shifted = 0.5 * (p.hessian + p.hessian.T) + p.shift * np.eye(n)
    mu, basis = scipy.linalg.eigh(shifted)
    coeffs = basis.T @ g
    mu_min = float(mu[0])
    norm_shifted = float(max(abs(mu[0]), abs(mu[-1])))

    def step_at(lam: float) -> np.ndarray:
        return np.asarray(-(basis @ (coeffs / (mu + lam))))

    if mu_min > 0.0:
        newton = step_at(0.0)
        if np.linalg.norm(newton) <= radius:
            return _solution(p, shifted, newton, 0.0, False, 0)

    if gnorm == 0.0:
        if mu_min >= 0.0:
            return _solution(p, shifted, np.zeros(n), 0.0, False, 0)
        return _solution(
            p, shifted, radius * basis[:, 0], -mu_min, True, 0
        )

    lam_lo = max(0.0, -mu_min)
    offset = 1e-12 * max(1.0, norm_shifted)

    if mu_min <= 0.0:
        trial = step_at(lam_lo + offset)
        if np.linalg.norm(trial) < radius:
            leftmost = mu <= mu_min + 1e-10 * max(1.0, norm_shifted)
            weights = np.zeros(n)
            weights[~leftmost] = coeffs[~leftmost] / (mu[~leftmost] - mu_min)
            base = -(basis @ weights)
            if mu_min == 0.0:
                # positive semidefinite: the minimum-norm step is optimal
                return _solution(p, shifted, base, 0.0, False, 0)
            tail = np.sqrt(max(0.0, radius**2 - float(np.dot(base, base))))
            candidates = [
                base + tail * basis[:, 0],
                base - tail * basis[:, 0],
            ]
            values = [
                float(np.dot(g, d) + 0.5 * np.dot(d, shifted @ d))
                for d in candidates
            ]
            step = candidates[int(np.argmin(values))]
            logger.debug("hard case, lambda=%g, tail=%g", -mu_min, tail)
            return _solution(p, shifted, step, -mu_min, True, 0)

    lo = lam_lo
    hi = gnorm / radius + norm_shifted
    lam = lam_lo + offset if mu_min <= 0.0 else 0.0
    root_rtol = min(1e-13, 1e-4 * cfg.kkt_tol)
    step = step_at(lam)
    step_norm = float(np.linalg.norm(step))

    for iteration in range(1, cfg.max_root_iters + 1):
        if abs(step_norm - radius) <= root_rtol * radius:
            break
        phi = 1.0 / step_norm - 1.0 / radius
        if phi < 0.0:
            lo = lam
        else:
            hi = lam
        dphi = float(np.sum(coeffs**2 / (mu + lam) ** 3)) / step_norm**3
        candidate = lam - phi / dphi if dphi > 0.0 else lo
        if not lo < candidate < hi:
            candidate = 0.5 * (lo + hi)
        lam = candidate
        step = step_at(lam)
        step_norm = float(np.linalg.norm(step))
    else:
        iteration = cfg.max_root_iters
        if abs(step_norm - radius) > cfg.kkt_tol * radius:
            raise NumericalError(
                "secular equation did not converge",
                {
                    "lambda": lam,
                    "step_norm": step_norm,
                    "radius": radius,
                    "bracket": (lo, hi),
                },
            )

    step = step * (radius / step_norm)
    return _solution(p, shifted, step, lam, False, iteration)
