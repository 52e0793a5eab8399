"""Success accounting and shifted geometric means of benchmark runs."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import asdict, dataclass
from typing import Dict, List, Sequence

import numpy as np
import pandas as pd

from public import public
from scipy.stats import gmean

from utrx.base import RunReport, RunStatus
from utrx.errors import ConfigurationError
from utrx.tools.typing import typechecked

TIME_SHIFT = 1.0
COUNT_SHIFT = 50.0

SUMMARY_COLUMNS = ["method", "K", "runs", "t_G", "k_G", "kf_G", "kg_G"]


@public
@typechecked
def shifted_geomean(values: Sequence[float], shift: float) -> float:
    """
    Return ``(prod(v_i + shift))^{1/n} - shift``.

    Raises
    ------
    ConfigurationError
        ``values`` is empty, holds a negative entry or ``shift <= 0``.
    """
    if not shift > 0:
        raise ConfigurationError(f"shift must be > 0, got {shift}")
    data = np.asarray(values, dtype=np.float64)
    if data.size == 0:
        raise ConfigurationError("shifted_geomean needs at least one value")
    if bool(np.any(data < 0)):
        raise ConfigurationError("shifted_geomean needs nonnegative values")
    return float(gmean(data + shift)) - shift


@public
@dataclass(frozen=True)
class SummaryRow:
    """
    One method's line of the benchmark table.

    ``kg_G`` counts gradient evaluations together with Hessian-vector
    products.
    """

    method: str
    K: int  # noqa: N815
    runs: int
    t_G: float  # noqa: N815
    k_G: float  # noqa: N815
    kf_G: float  # noqa: N815
    kg_G: float  # noqa: N815


@public
@typechecked
def is_success(report: RunReport, eps: float) -> bool:
    """Return whether a run reached ``||g|| <= eps`` without failing."""
    return bool(
        report.status is not RunStatus.Failure and report.grad_norm <= eps
    )


@public
@typechecked
def summarize(
    reports: List[RunReport], eps: float, sentinel: float = 20_000.0
) -> List[SummaryRow]:
    """
    Aggregate reports per method.

    Failed runs contribute ``sentinel`` to every aggregate. Rows are sorted
    by method name.
    """
    if not reports:
        raise ConfigurationError("summarize needs at least one report")
    grouped: Dict[str, List[RunReport]] = defaultdict(list)
    for report in reports:
        grouped[report.method].append(report)

    rows = []
    for method in sorted(grouped):
        runs = sorted(grouped[method], key=lambda item: item.problem)
        times: List[float] = []
        iterations: List[float] = []
        f_counts: List[float] = []
        g_counts: List[float] = []
        successes = 0
        for report in runs:
            if is_success(report, eps):
                successes += 1
                times.append(report.wall_time)
                iterations.append(float(report.iteration_count))
                f_counts.append(float(report.function_evaluations))
                g_counts.append(float(report.gradient_evaluations))
            else:
                times.append(sentinel)
                iterations.append(sentinel)
                f_counts.append(sentinel)
                g_counts.append(sentinel)
        rows.append(
            SummaryRow(
                method=method,
                K=successes,
                runs=len(runs),
                t_G=shifted_geomean(times, TIME_SHIFT),
                k_G=shifted_geomean(iterations, COUNT_SHIFT),
                kf_G=shifted_geomean(f_counts, COUNT_SHIFT),
                kg_G=shifted_geomean(g_counts, COUNT_SHIFT),
            )
        )
    return rows


@public
@typechecked
def summary_frame(rows: List[SummaryRow]) -> pd.DataFrame:
    """Return the summary table as a DataFrame."""
    return pd.DataFrame([asdict(row) for row in rows], columns=SUMMARY_COLUMNS)
