"""Trust-region subproblem data types and KKT certification."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np
import scipy.sparse as sp

from public import public
from scipy.sparse.linalg import LinearOperator, aslinearoperator

from utrx.base import Vector
from utrx.errors import ConfigurationError
from utrx.tools.typing import as_float_array, typechecked
from utrx.trs.eigen import as_operator, smallest_eigpair

KRYLOV_RULES = ("adaptive", "exact")


@public
@dataclass(frozen=True)
class TrsConfig:
    """
    Tolerances of the subproblem solvers.

    Attributes
    ----------
    kkt_tol : float
        Target accuracy of the KKT conditions.
    max_root_iters : int
        Safeguarded Newton/bisection steps allowed on the secular equation.
    krylov_dim_cap : int
        Largest Krylov subspace built by the iterative solvers.
    krylov_inexactness : str
        ``"adaptive"`` stops once the stationarity residual is below
        ``min(0.1, sqrt(||g||)) * ||g||``; ``"exact"`` requires
        ``kkt_tol * max(1, ||g||)``.
    """

    kkt_tol: float = 1e-8
    max_root_iters: int = 100
    krylov_dim_cap: int = 100
    krylov_inexactness: str = "adaptive"

    def __post_init__(self) -> None:
        if not self.kkt_tol > 0:
            raise ConfigurationError("kkt_tol must be > 0")
        if self.max_root_iters < 1:
            raise ConfigurationError("max_root_iters must be >= 1")
        if self.krylov_dim_cap < 1:
            raise ConfigurationError("krylov_dim_cap must be >= 1")
        if self.krylov_inexactness not in KRYLOV_RULES:
            raise ConfigurationError(
                f"krylov_inexactness must be one of {KRYLOV_RULES}"
            )

    def krylov_tolerance(self, gnorm: float) -> float:
        """Return the stationarity residual accepted by Krylov solvers."""
        if self.krylov_inexactness == "adaptive":
            return min(0.1, float(np.sqrt(gnorm))) * gnorm
        return self.kkt_tol * max(1.0, gnorm)


@public
@dataclass
class TrsProblem:
    """
    min_d g^T d + 1/2 d^T (H + sigma sqrt(||g||) I) d  s.t.  ||d|| <= radius.
    """

    hessian: Union[np.ndarray, LinearOperator]
    gradient: Vector
    sigma: float
    radius: float

    def __post_init__(self) -> None:
        self.gradient = as_float_array(self.gradient)
        if not bool(np.all(np.isfinite(self.gradient))):
            raise ConfigurationError("gradient must be finite")
        if not self.sigma >= 0:
            raise ConfigurationError(f"sigma must be >= 0, got {self.sigma}")
        if not self.radius > 0:
            raise ConfigurationError(
                f"radius must be > 0, got {self.radius}"
            )
        if tuple(self.hessian.shape) != (self.dimension, self.dimension):
            raise ConfigurationError(
                f"Hessian shape {self.hessian.shape} does not match "
                f"gradient size {self.dimension}"
            )

    @property
    def dimension(self) -> int:
        return int(self.gradient.size)

    @property
    def gnorm(self) -> float:
        return float(np.linalg.norm(self.gradient))

    @property
    def shift(self) -> float:
        """Return the regularization shift ``sigma * sqrt(||g||)``."""
        return self.sigma * float(np.sqrt(self.gnorm))

    def shifted_operator(self, extra: float = 0.0) -> LinearOperator:
        """Return ``H + (shift + extra) I`` as a LinearOperator."""
        identity = aslinearoperator(sp.identity(self.dimension))
        return as_operator(self.hessian) + (self.shift + extra) * identity


@public
@dataclass
class TrsSolution:
    """
    Step and dual multiplier of a trust-region subproblem.

    ``converged`` is False when an iterative solver stopped at its subspace
    cap before meeting its residual rule.
    """

    step: Vector
    multiplier: float
    model_decrease: float
    on_boundary: bool
    hard_case: bool = False
    inner_iterations: int = 0
    converged: bool = True

    @property
    def step_norm(self) -> float:
        return float(np.linalg.norm(self.step))


@public
@typechecked
def realized_radius(g: Vector, r: float) -> float:
    """Return ``r * sqrt(||g||)``; zero when g vanishes."""
    if not r > 0:
        raise ConfigurationError(f"r must be > 0, got {r}")
    return r * float(np.sqrt(np.linalg.norm(g)))


@public
@typechecked
def model_value(p: TrsProblem, step: Vector) -> float:
    """Return ``g^T d + 1/2 d^T (H + shift I) d``."""
    curvature = float(np.dot(step, p.shifted_operator().matvec(step)))
    return float(np.dot(p.gradient, step)) + 0.5 * curvature


@public
@typechecked
def kkt_residual(
    p: TrsProblem, s: TrsSolution
) -> Tuple[float, float, float, float]:
    """
    Return the four KKT residuals of a subproblem solution.

    Returns
    -------
    feas : float
        ``max(0, ||d|| - radius)``.
    slack : float
        ``|lambda (||d|| - radius)|``.
    stat : float
        ``||(H + shift I + lambda I) d + g||``.
    curv : float
        ``max(0, -lambda_min(H + shift I + lambda I))``.
    """
    step_norm = s.step_norm
    feas = max(0.0, step_norm - p.radius)
    slack = abs(s.multiplier * (step_norm - p.radius))
    shifted = p.shifted_operator(s.multiplier)
    stat = float(np.linalg.norm(shifted.matvec(s.step) + p.gradient))
    if isinstance(p.hessian, np.ndarray):
        dense = p.hessian + (p.shift + s.multiplier) * np.eye(p.dimension)
        lam_min, _ = smallest_eigpair(dense)
    else:
        lam_min, _ = smallest_eigpair(shifted, tol=1e-10)
    return feas, slack, stat, max(0.0, -lam_min)
