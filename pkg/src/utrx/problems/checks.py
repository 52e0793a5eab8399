"""Finite-difference self-checks of objective oracles."""

from __future__ import annotations

from typing import Tuple

import numpy as np

from public import public

from utrx.base import Vector
from utrx.errors import ConfigurationError
from utrx.problems.base import ObjectiveOracle
from utrx.tools.typing import typechecked


@public
@typechecked
def finite_difference_check(
    oracle: ObjectiveOracle, x: Vector, h: float = 1e-5
) -> Tuple[float, float]:
    """
    Compare analytic derivatives with central differences.

    Parameters
    ----------
    oracle : ObjectiveOracle
        Oracle under test.
    x : Vector
        Evaluation point.
    h : float
        Difference step along each canonical direction.

    Returns
    -------
    grad_err : float
        ``max_i |g_i - (f(x+h e_i) - f(x-h e_i)) / 2h|`` relative to
        ``max(1, ||g||_inf)``.
    hess_err : float
        Largest deviation between ``H e_i`` from ``hessian_vector`` and the
        central difference of the gradient, relative to
        ``max(1, max|H e_i|)``.
    """
    if not h > 0:
        raise ConfigurationError(f"h must be > 0, got {h}")
    x = np.asarray(x, dtype=np.float64)
    n = oracle.dimension
    grad = oracle.gradient(x)

    grad_fd = np.empty(n)
    hess_dev = 0.0
    hess_scale = 1.0
    for i in range(n):
        step = np.zeros(n)
        step[i] = h
        grad_fd[i] = (oracle.value(x + step) - oracle.value(x - step)) / (
            2.0 * h
        )
        column = oracle.hessian_vector(x, np.eye(n)[i])
        column_fd = (oracle.gradient(x + step) - oracle.gradient(x - step)) / (
            2.0 * h
        )
        hess_dev = max(hess_dev, float(np.max(np.abs(column - column_fd))))
        hess_scale = max(hess_scale, float(np.max(np.abs(column))))

    grad_scale = max(1.0, float(np.max(np.abs(grad))))
    grad_err = float(np.max(np.abs(grad - grad_fd))) / grad_scale
    return grad_err, hess_dev / hess_scale
