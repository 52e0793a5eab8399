"""Execution of solver-by-problem grids."""

from __future__ import annotations

import logging

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, FrozenSet, List, Optional, Tuple

import numpy as np

from public import public

from utrx.accel import accel_minimize
from utrx.adaptive import AdaptiveConfig, autr_minimize
from utrx.base import RunReport, RunStatus
from utrx.baselines import (
    ClassicTrConfig,
    classic_tr_minimize,
    reg_newton_minimize,
)
from utrx.errors import ConfigurationError, UTRError
from utrx.harness.config import ExperimentConfig, SolverSpec
from utrx.harness.summary import SummaryRow, summarize, summary_frame
from utrx.harness.traces import (
    emit_trace_plots_data,
    outer_frame,
    run_file_stem,
    write_trace,
)
from utrx.problems.base import ProblemInstance
from utrx.problems.suite import get_problem, validate_problem_name
from utrx.tools.typing import typechecked
from utrx.trs import TrsConfig
from utrx.utr import utr_minimize

logger = logging.getLogger(__name__)

Runner = Callable[[ProblemInstance, ExperimentConfig, SolverSpec], RunReport]

_ADAPTIVE_KEYS = frozenset(
    {"eta", "xi", "rho0", "rho_min", "gamma1", "gamma2", "max_inner"}
)
_CLASSIC_KEYS = frozenset(
    {"delta0", "eta_accept", "shrink", "grow", "delta_max"}
)
_TRS_KEYS = frozenset({"kkt_tol", "max_root_iters", "krylov_dim_cap"})


def _lipschitz(p: ProblemInstance, options: Dict[str, Any]) -> float:
    if "M" in options:
        return float(options["M"])
    return float(p.lipschitz_hint) if p.lipschitz_hint is not None else 1.0


def _trs_config(options: Dict[str, Any]) -> Optional[TrsConfig]:
    values = {key: options[key] for key in _TRS_KEYS if key in options}
    return TrsConfig(**values) if values else None


def _run_utr(subsolver: str) -> Runner:
    def run(
        p: ProblemInstance, cfg: ExperimentConfig, spec: SolverSpec
    ) -> RunReport:
        return utr_minimize(
            p,
            _lipschitz(p, spec.options),
            eps=cfg.eps,
            max_iter=cfg.iter_limit,
            convex_mode=bool(spec.options.get("convex_mode", False)),
            subsolver=subsolver,
            trs_config=_trs_config(spec.options),
            time_limit=cfg.time_limit,
            method=spec.label,
        )

    return run


def _run_autr(subsolver: str) -> Runner:
    def run(
        p: ProblemInstance, cfg: ExperimentConfig, spec: SolverSpec
    ) -> RunReport:
        values = {
            key: spec.options[key]
            for key in _ADAPTIVE_KEYS
            if key in spec.options
        }
        adaptive = AdaptiveConfig(
            eps=cfg.eps, max_outer=cfg.iter_limit, **values
        )
        return autr_minimize(
            p,
            adaptive,
            subsolver=subsolver,
            trs_config=_trs_config(spec.options),
            time_limit=cfg.time_limit,
            convex_mode=bool(spec.options.get("convex_mode", False)),
            method=spec.label,
            seed=cfg.seed,
        )

    return run


def _run_accel(
    p: ProblemInstance, cfg: ExperimentConfig, spec: SolverSpec
) -> RunReport:
    return accel_minimize(
        p,
        _lipschitz(p, spec.options),
        eps=cfg.eps,
        max_outer=int(spec.options.get("max_outer", 100)),
        use_known_optimum=False,
        max_inner=cfg.iter_limit,
        trs_config=_trs_config(spec.options),
        time_limit=cfg.time_limit,
        method=spec.label,
    )


def _run_classic(subsolver: str) -> Runner:
    def run(
        p: ProblemInstance, cfg: ExperimentConfig, spec: SolverSpec
    ) -> RunReport:
        values = {
            key: float(spec.options[key])
            for key in _CLASSIC_KEYS
            if key in spec.options
        }
        return classic_tr_minimize(
            p,
            ClassicTrConfig(**values),
            eps=cfg.eps,
            max_iter=cfg.iter_limit,
            subsolver=subsolver,
            trs_config=_trs_config(spec.options),
            time_limit=cfg.time_limit,
            method=spec.label,
        )

    return run


def _run_reg_newton(
    p: ProblemInstance, cfg: ExperimentConfig, spec: SolverSpec
) -> RunReport:
    return reg_newton_minimize(
        p,
        lam=float(spec.options.get("lam", 1e-3)),
        power=float(spec.options.get("power", 0.5)),
        eps=cfg.eps,
        max_iter=cfg.iter_limit,
        time_limit=cfg.time_limit,
        method=spec.label,
    )


@public
@dataclass(frozen=True)
class SolverEntry:
    """A registered method and the options it accepts."""

    run: Runner
    options: FrozenSet[str]


SOLVER_REGISTRY: Dict[str, SolverEntry] = {
    "utr": SolverEntry(
        _run_utr("direct"), _TRS_KEYS | {"M", "convex_mode"}
    ),
    "iutr": SolverEntry(
        _run_utr("krylov"), _TRS_KEYS | {"M", "convex_mode"}
    ),
    "autr": SolverEntry(
        _run_autr("direct"), _TRS_KEYS | _ADAPTIVE_KEYS | {"convex_mode"}
    ),
    "iautr": SolverEntry(
        _run_autr("krylov"), _TRS_KEYS | _ADAPTIVE_KEYS | {"convex_mode"}
    ),
    "accel": SolverEntry(_run_accel, _TRS_KEYS | {"M", "max_outer"}),
    "classic_tr": SolverEntry(
        _run_classic("direct"), _TRS_KEYS | _CLASSIC_KEYS
    ),
    "classic_tr_stcg": SolverEntry(
        _run_classic("stcg"), _TRS_KEYS | _CLASSIC_KEYS
    ),
    "reg_newton": SolverEntry(_run_reg_newton, frozenset({"lam", "power"})),
}


@public
@typechecked
def validate_config(cfg: ExperimentConfig) -> None:
    """
    Check every solver name, option and problem before anything runs.

    Raises
    ------
    ConfigurationError
        A name is not registered, an option is not accepted by its method
        or a problem cannot be built.
    """
    for spec in cfg.solvers:
        if spec.name not in SOLVER_REGISTRY:
            raise ConfigurationError(
                f"unknown solver {spec.name!r}; expected one of "
                f"{sorted(SOLVER_REGISTRY)}"
            )
        unknown = set(spec.options) - SOLVER_REGISTRY[spec.name].options
        if unknown:
            raise ConfigurationError(
                f"solver {spec.label!r} does not accept {sorted(unknown)}"
            )
    for name in cfg.problems:
        validate_problem_name(name)


def _failed_report(spec: SolverSpec, problem: str, message: str) -> RunReport:
    return RunReport(
        method=spec.label,
        problem=problem,
        status=RunStatus.Failure,
        x=np.zeros(0),
        f=float("nan"),
        grad_norm=float("inf"),
        message=message,
    )


@public
@typechecked
def run_single(
    spec: SolverSpec, problem: str, cfg: ExperimentConfig
) -> RunReport:
    """
    Build ``problem`` and run one method on it.

    Library errors raised inside the method become a ``Failure`` report
    so one broken run does not stop the grid.
    """
    instance = get_problem(problem)
    entry = SOLVER_REGISTRY[spec.name]
    try:
        report = entry.run(instance, cfg, spec)
    except ConfigurationError:
        raise
    except UTRError as exc:
        logger.error("%s on %s raised: %s", spec.label, problem, exc)
        return _failed_report(spec, instance.name, str(exc))
    logger.info(
        "%s on %s: %s in %.2fs",
        spec.label,
        problem,
        report.status.value,
        report.wall_time,
    )
    return report


def _run_task(task: Tuple[SolverSpec, str, ExperimentConfig]) -> RunReport:
    return run_single(*task)


@public
@typechecked
def write_outputs(
    reports: List[RunReport],
    table: List[SummaryRow],
    cfg: ExperimentConfig,
) -> Path:
    """
    Persist reports, traces, the summary and a configuration snapshot.

    Layout under ``cfg.output_dir``: ``reports/<stem>.json``,
    ``iterations/<stem>.csv`` (detailed trace), ``traces/<stem>.csv``
    (plot data), ``outer/<stem>.csv`` for accelerated runs,
    ``summary.csv`` and ``experiment.yaml``.
    """
    root = cfg.output_dir
    (root / "reports").mkdir(parents=True, exist_ok=True)
    for report in reports:
        stem = run_file_stem(report)
        (root / "reports" / f"{stem}.json").write_text(
            report.to_json(), encoding="utf-8"
        )
        write_trace(report, root / "iterations" / f"{stem}.csv")
        if report.outer:
            (root / "outer").mkdir(exist_ok=True)
            outer_frame(report).to_csv(
                root / "outer" / f"{stem}.csv", index=False
            )
    emit_trace_plots_data(reports, root / "traces")
    summary_frame(table).to_csv(root / "summary.csv", index=False)
    (root / "experiment.yaml").write_text(cfg.to_yaml(), encoding="utf-8")
    return root


@public
@typechecked
def run_experiment(
    cfg: ExperimentConfig, write: bool = True
) -> Tuple[List[RunReport], List[SummaryRow]]:
    """
    Run every solver on every problem and summarize.

    Reports are sorted by method label, then problem name. With
    ``cfg.workers > 1`` runs execute in a process pool; each worker builds
    its own problem instance.
    """
    validate_config(cfg)
    tasks = [
        (spec, problem, cfg)
        for spec in cfg.solvers
        for problem in cfg.problems
    ]
    logger.info(
        "running %d solvers on %d problems (%d workers)",
        len(cfg.solvers),
        len(cfg.problems),
        cfg.workers,
    )
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            reports = list(pool.map(_run_task, tasks))
    else:
        reports = [_run_task(task) for task in tasks]
    reports.sort(key=lambda report: (report.method, report.problem))
    table = summarize(reports, cfg.eps, cfg.failure_sentinel)
    if write:
        write_outputs(reports, table, cfg)
    return reports, table
