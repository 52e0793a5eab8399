"""Per-run trace tables written as CSV."""

from __future__ import annotations

import logging
import re

from pathlib import Path
from typing import List, Union

import pandas as pd

from public import public

from utrx.base import RunReport
from utrx.errors import ConfigurationError
from utrx.tools.typing import typechecked

logger = logging.getLogger(__name__)

TRACE_COLUMNS = [
    "k",
    "f",
    "gnorm",
    "lambda",
    "stepnorm",
    "class",
    "retries",
    "rho",
    "lambda_min",
    "branch",
    "inner_retries",
    "radius",
    "ratio",
    "wall_time",
]
OUTER_COLUMNS = ["k", "a", "A", "inner_iters", "grad_h_norm", "f", "gnorm"]
PLOT_COLUMNS = ["k", "f", "gnorm", "wall_time"]


def safe_name(name: str) -> str:
    """Return ``name`` with path separators and spaces replaced."""
    return re.sub(r"[^\w.+-]+", "_", name).strip("_") or "run"


@public
def run_file_stem(report: RunReport) -> str:
    """Return ``method__problem`` for file names."""
    return f"{safe_name(report.method)}__{safe_name(report.problem)}"


@public
@typechecked
def trace_frame(report: RunReport) -> pd.DataFrame:
    """Return one row per accepted iteration of ``report``."""
    rows = [
        {
            "k": rec.k,
            "f": rec.f_after,
            "gnorm": rec.grad_norm_after,
            "lambda": rec.lam,
            "stepnorm": rec.step_norm,
            "class": (
                rec.classification.value if rec.classification else None
            ),
            "retries": rec.retries,
            "rho": rec.params.rho,
            "lambda_min": rec.lambda_min,
            "branch": rec.branch,
            "inner_retries": (
                rec.retries if rec.params.rho is not None else None
            ),
            "radius": rec.radius,
            "ratio": rec.ratio,
            "wall_time": rec.wall_time,
        }
        for rec in report.accepted
    ]
    return pd.DataFrame(rows, columns=TRACE_COLUMNS)


@public
@typechecked
def outer_frame(report: RunReport) -> pd.DataFrame:
    """Return one row per outer iteration of an accelerated run."""
    rows = [
        {
            "k": rec.k,
            "a": rec.a,
            "A": rec.A,
            "inner_iters": rec.inner_iterations,
            "grad_h_norm": rec.grad_h_norm,
            "f": rec.f,
            "gnorm": rec.grad_norm,
        }
        for rec in report.outer
    ]
    return pd.DataFrame(rows, columns=OUTER_COLUMNS)


@public
@typechecked
def plot_frame(report: RunReport) -> pd.DataFrame:
    """
    Return ``(k, f, gnorm, wall_time)`` for external plotting.

    Accelerated runs use their outer iterations; other runs their accepted
    iterations.
    """
    if report.outer:
        rows = [
            {
                "k": rec.k,
                "f": rec.f,
                "gnorm": rec.grad_norm,
                "wall_time": rec.wall_time,
            }
            for rec in report.outer
        ]
    else:
        rows = [
            {
                "k": rec.k,
                "f": rec.f_after,
                "gnorm": rec.grad_norm_after,
                "wall_time": rec.wall_time,
            }
            for rec in report.accepted
        ]
    return pd.DataFrame(rows, columns=PLOT_COLUMNS)


@public
@typechecked
def write_trace(report: RunReport, path: Union[str, Path]) -> Path:
    """Write the detailed trace of ``report`` as CSV and return the path."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    trace_frame(report).to_csv(target, index=False)
    return target


@public
@typechecked
def emit_trace_plots_data(
    reports: List[RunReport], directory: Union[str, Path]
) -> List[Path]:
    """
    Write one ``method__problem.csv`` plot table per report.

    Raises
    ------
    ConfigurationError
        ``reports`` is empty.
    """
    if not reports:
        raise ConfigurationError("no reports to write")
    target = Path(directory)
    target.mkdir(parents=True, exist_ok=True)
    paths = []
    for report in reports:
        path = target / f"{run_file_stem(report)}.csv"
        plot_frame(report).to_csv(path, index=False)
        paths.append(path)
    logger.info("wrote %d trace files to %s", len(paths), target)
    return paths
