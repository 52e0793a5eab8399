"""Trust-region subproblem solvers."""

from utrx.trs.base import (
    TrsConfig,
    TrsProblem,
    TrsSolution,
    kkt_residual,
    model_value,
    realized_radius,
)
from utrx.trs.direct import solve_trs_direct
from utrx.trs.eigen import as_operator, smallest_eigpair
from utrx.trs.krylov import solve_trs_krylov, solve_trs_steihaug

__all__ = [
    "TrsConfig",
    "TrsProblem",
    "TrsSolution",
    "as_operator",
    "kkt_residual",
    "model_value",
    "realized_radius",
    "smallest_eigpair",
    "solve_trs_direct",
    "solve_trs_krylov",
    "solve_trs_steihaug",
]
