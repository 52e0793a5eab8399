# mypy: disable-error-code="attr-defined"
"""utrx: universal trust-region methods for unconstrained minimization."""

from importlib import metadata as importlib_metadata

from utrx import accel, adaptive, base, baselines, errors, problems, trs, utr
from utrx.accel import (
    AccelState,
    ContractedOracle,
    CubicBregman,
    accel_minimize,
    bregman_divergence,
    contracted_oracle,
    inner_tolerance,
)
from utrx.adaptive import (
    AdaptiveConfig,
    Step,
    Terminate,
    autr_minimize,
    check_modified_decrease,
    eigenpoint,
    reference_minimum,
    rho_max_bound,
    select_params,
    sosp_certificate,
)
from utrx.base import (
    EvalCounters,
    IterationRecord,
    OuterRecord,
    RunReport,
    RunStatus,
    StepClass,
    StepParams,
)
from utrx.baselines import (
    ClassicTrConfig,
    acceptance_ratio,
    classic_tr_minimize,
    reg_newton_minimize,
)
from utrx.errors import (
    ConfigurationError,
    ContractViolation,
    DataError,
    NumericalError,
    ParseError,
    UTRError,
)
from utrx.problems import (
    ObjectiveOracle,
    ProblemInstance,
    finite_difference_check,
    get_problem,
    load_libsvm,
)
from utrx.trs import (
    TrsConfig,
    TrsProblem,
    TrsSolution,
    kkt_residual,
    smallest_eigpair,
    solve_trs_direct,
    solve_trs_krylov,
    solve_trs_steihaug,
)
from utrx.utr import (
    ConditionOutcome,
    SimpleConstants,
    check_conditions,
    classify_iteration,
    posterior_principle,
    simple_strategy,
    utr_minimize,
)


def get_version() -> str:
    """Return the program version."""
    try:
        return importlib_metadata.version(__name__)
    except importlib_metadata.PackageNotFoundError:  # pragma: no cover
        return "0.1.0"


__all__ = [
    "AccelState",
    "AdaptiveConfig",
    "ClassicTrConfig",
    "ConditionOutcome",
    "ConfigurationError",
    "ContractViolation",
    "ContractedOracle",
    "CubicBregman",
    "DataError",
    "EvalCounters",
    "IterationRecord",
    "NumericalError",
    "ObjectiveOracle",
    "OuterRecord",
    "ParseError",
    "ProblemInstance",
    "RunReport",
    "RunStatus",
    "SimpleConstants",
    "Step",
    "StepClass",
    "StepParams",
    "Terminate",
    "TrsConfig",
    "TrsProblem",
    "TrsSolution",
    "UTRError",
    "accel",
    "accel_minimize",
    "acceptance_ratio",
    "adaptive",
    "autr_minimize",
    "base",
    "baselines",
    "bregman_divergence",
    "check_conditions",
    "check_modified_decrease",
    "classic_tr_minimize",
    "classify_iteration",
    "contracted_oracle",
    "eigenpoint",
    "errors",
    "finite_difference_check",
    "get_problem",
    "get_version",
    "inner_tolerance",
    "kkt_residual",
    "load_libsvm",
    "posterior_principle",
    "problems",
    "reference_minimum",
    "reg_newton_minimize",
    "rho_max_bound",
    "select_params",
    "simple_strategy",
    "smallest_eigpair",
    "solve_trs_direct",
    "solve_trs_krylov",
    "solve_trs_steihaug",
    "sosp_certificate",
    "trs",
    "utr",
    "utr_minimize",
]


version: str = get_version()

__version__: str = version
