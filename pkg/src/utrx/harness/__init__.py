"""Benchmark harness: experiment configuration, runs and summaries."""

from utrx.harness.config import (
    ExperimentConfig,
    SolverSpec,
    default_solvers,
    load_config,
)
from utrx.harness.runner import (
    SOLVER_REGISTRY,
    run_experiment,
    run_single,
    validate_config,
)
from utrx.harness.summary import (
    SummaryRow,
    is_success,
    shifted_geomean,
    summarize,
    summary_frame,
)
from utrx.harness.traces import (
    emit_trace_plots_data,
    outer_frame,
    plot_frame,
    trace_frame,
    write_trace,
)

__all__ = [
    "SOLVER_REGISTRY",
    "ExperimentConfig",
    "SolverSpec",
    "SummaryRow",
    "default_solvers",
    "emit_trace_plots_data",
    "is_success",
    "load_config",
    "outer_frame",
    "plot_frame",
    "run_experiment",
    "run_single",
    "shifted_geomean",
    "summarize",
    "summary_frame",
    "trace_frame",
    "validate_config",
    "write_trace",
]
