"""Command-line interface: ``utrx run | summarize | check``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from utrx.base import RunReport
from utrx.errors import ConfigurationError, DataError
from utrx.harness.config import SolverSpec, load_config
from utrx.harness.runner import SOLVER_REGISTRY, run_experiment
from utrx.harness.summary import is_success, summarize, summary_frame
from utrx.problems.checks import finite_difference_check
from utrx.problems.suite import get_problem, problem_names

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_RUN_FAILURE = 1
EXIT_CONFIG_ERROR = 2

CHECK_TOLERANCE = 1e-4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="utrx",
        description="Universal trust-region methods and their benchmark.",
    )
    parser.add_argument(
        "--log-level",
        default="WARNING",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Logging level (default: WARNING).",
    )
    parser.add_argument(
        "-v",
        "--verbose",
        action="store_true",
        help="Shortcut for --log-level INFO.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="Run a solver-by-problem grid.")
    run.add_argument("--config", type=Path, help="YAML experiment file.")
    run.add_argument(
        "--solver",
        action="append",
        metavar="NAME",
        help=f"Solver to run, repeatable; one of {sorted(SOLVER_REGISTRY)}.",
    )
    run.add_argument(
        "--problem",
        action="append",
        metavar="NAME",
        help="Suite instance or LIBSVM file, repeatable.",
    )
    run.add_argument("--eps", type=float, help="Gradient-norm tolerance.")
    run.add_argument("--max-iter", type=int, help="Iteration budget per run.")
    run.add_argument("--time-limit", type=float, help="Seconds per run.")
    run.add_argument("--workers", type=int, help="Parallel worker processes.")
    run.add_argument("--out", type=Path, help="Output directory.")

    summary = commands.add_parser(
        "summarize", help="Recompute the summary from stored reports."
    )
    summary.add_argument(
        "directory",
        type=Path,
        help="Output directory of a run, or its reports/ subdirectory.",
    )
    summary.add_argument("--eps", type=float, default=1e-5)
    summary.add_argument("--sentinel", type=float, default=20_000.0)

    check = commands.add_parser(
        "check", help="Finite-difference check of the problem oracles."
    )
    check.add_argument(
        "--problem",
        action="append",
        metavar="NAME",
        help="Instance to check, repeatable (default: whole suite).",
    )
    check.add_argument("--tol", type=float, default=CHECK_TOLERANCE)
    check.add_argument("--seed", type=int, default=0)
    return parser


def _command_run(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    solvers = None
    if args.solver:
        solvers = [SolverSpec(name) for name in args.solver]
    cfg = cfg.with_overrides(
        solvers=solvers,
        problems=args.problem,
        eps=args.eps,
        iter_limit=args.max_iter,
        time_limit=args.time_limit,
        workers=args.workers,
        output_dir=args.out,
    )
    reports, table = run_experiment(cfg)
    print(summary_frame(table).to_string(index=False))
    failures = [
        report for report in reports if not is_success(report, cfg.eps)
    ]
    for report in failures:
        logger.warning(
            "%s on %s did not succeed: %s (%s)",
            report.method,
            report.problem,
            report.status.value,
            report.message,
        )
    return EXIT_RUN_FAILURE if failures else EXIT_OK


def _command_summarize(args: argparse.Namespace) -> int:
    directory = args.directory
    if (directory / "reports").is_dir():
        directory = directory / "reports"
    files = sorted(directory.glob("*.json"))
    if not files:
        raise ConfigurationError(f"no reports found in {directory}")
    reports: List[RunReport] = []
    for path in files:
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
            reports.append(RunReport.from_dict(data))
        except (ValueError, KeyError) as exc:
            raise DataError(f"{path}: not a run report: {exc}") from exc
    table = summarize(reports, args.eps, args.sentinel)
    print(summary_frame(table).to_string(index=False))
    return EXIT_OK


def _command_check(args: argparse.Namespace) -> int:
    names = args.problem or problem_names()
    rng = np.random.default_rng(args.seed)
    worst = 0.0
    for name in names:
        problem = get_problem(name)
        # a perturbed start avoids points where the oracle is special
        x = problem.start + 0.1 * rng.standard_normal(problem.dimension)
        grad_err, hess_err = finite_difference_check(problem.oracle, x)
        worst = max(worst, grad_err, hess_err)
        status = "ok" if max(grad_err, hess_err) <= args.tol else "FAIL"
        print(
            f"{problem.name:<24} grad {grad_err:.2e}  hess {hess_err:.2e}  "
            f"{status}"
        )
    return EXIT_OK if worst <= args.tol else EXIT_RUN_FAILURE


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the command line; return the process exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    level = "INFO" if args.verbose and args.log_level == "WARNING" else None
    logging.basicConfig(
        level=level or args.log_level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    handlers = {
        "run": _command_run,
        "summarize": _command_summarize,
        "check": _command_check,
    }
    try:
        return handlers[args.command](args)
    except (ConfigurationError, DataError) as exc:
        print(f"utrx: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR


if __name__ == "__main__":
    sys.exit(main())
