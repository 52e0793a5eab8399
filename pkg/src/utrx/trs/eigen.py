"""Smallest eigenpair of symmetric operators."""

import logging

from typing import List, Optional, Tuple

import numpy as np
import scipy.linalg

from plum import dispatch
from scipy.sparse.linalg import LinearOperator, aslinearoperator

from utrx.errors import ConfigurationError, NumericalError
from utrx.problems.base import check_symmetric

__all__ = ["SYMMETRY_RTOL", "as_operator", "smallest_eigpair"]

logger = logging.getLogger(__name__)

# symmetry tolerance for matrices handed to the subproblem solvers
SYMMETRY_RTOL = 1e-10


@dispatch
def as_operator(hessian: np.ndarray) -> LinearOperator:
    """Return ``hessian`` as a LinearOperator."""
    return aslinearoperator(hessian)


@dispatch
def as_operator(hessian: LinearOperator) -> LinearOperator:
    return hessian


@dispatch
def smallest_eigpair(
    hessian: np.ndarray,
    tol: float = 1e-8,
    max_iter: Optional[int] = None,
    seed: int = 0,
) -> Tuple[float, np.ndarray]:
    """
    Return the smallest eigenvalue of a symmetric matrix and a unit vector.

    The dense path uses a full symmetric eigendecomposition, so ``tol``,
    ``max_iter`` and ``seed`` only matter for LinearOperator input.
    """
    if not tol > 0:
        raise ConfigurationError(f"tol must be > 0, got {tol}")
    check_symmetric(hessian, rtol=SYMMETRY_RTOL)
    symmetric = 0.5 * (hessian + hessian.T)
    values, vectors = scipy.linalg.eigh(symmetric, subset_by_index=[0, 0])
    vector = vectors[:, 0]
    return float(values[0]), vector / np.linalg.norm(vector)


@dispatch
def smallest_eigpair(
    hessian: LinearOperator,
    tol: float = 1e-8,
    max_iter: Optional[int] = None,
    seed: int = 0,
) -> Tuple[float, np.ndarray]:
    """
    Lanczos iteration with full reorthogonalization.

    Stops once the Ritz residual ``beta_j |s_j|`` of the leftmost Ritz pair
    is below ``tol * max(1, ||T||)``, on breakdown, or when the Krylov space
    fills the whole space. ``seed`` draws the random start vector.

    Raises
    ------
    NumericalError
        ``max_iter`` steps were taken without convergence; the best Ritz
        pair is attached to ``diagnostics``.
    """
    if not tol > 0:
        raise ConfigurationError(f"tol must be > 0, got {tol}")
    n = int(hessian.shape[0])
    steps = n if max_iter is None else min(int(max_iter), n)
    if steps < 1:
        raise ConfigurationError("max_iter must be >= 1")

    rng = np.random.default_rng(seed)
    q = rng.standard_normal(n)
    q /= np.linalg.norm(q)
    basis = np.zeros((n, steps))
    alphas: List[float] = []
    betas: List[float] = []
    q_prev = np.zeros(n)
    beta_prev = 0.0
    theta = np.inf
    residual = np.inf

    for j in range(steps):
        basis[:, j] = q
        w = np.ravel(hessian.matvec(q)).astype(np.float64)
        alpha = float(np.dot(q, w))
        w = w - alpha * q - beta_prev * q_prev
        for _ in range(2):
            w -= basis[:, : j + 1] @ (basis[:, : j + 1].T @ w)
        beta = float(np.linalg.norm(w))
        alphas.append(alpha)

        if j == 0:
            theta, ritz = alpha, np.ones((1, 1))
        else:
            values, ritz = scipy.linalg.eigh_tridiagonal(
                np.array(alphas),
                np.array(betas),
                select="i",
                select_range=(0, 0),
            )
            theta = float(values[0])
        scale = max(
            1.0, float(np.max(np.abs(alphas))) + 2.0 * max(betas, default=0)
        )
        residual = beta * abs(float(ritz[-1, 0]))
        if residual <= tol * scale or beta <= 1e-14 * scale or j + 1 == n:
            vector = basis[:, : j + 1] @ ritz[:, 0]
            logger.debug(
                "lanczos converged in %d steps, residual %.2e", j + 1, residual
            )
            return float(theta), vector / np.linalg.norm(vector)

        betas.append(beta)
        q_prev, q, beta_prev = q, w / beta, beta

    raise NumericalError(
        f"Lanczos did not converge in {steps} steps",
        {"lambda_min": float(theta), "residual": float(residual)},
    )
