"""Experiment configuration and its YAML representation."""

from __future__ import annotations

import dataclasses

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import yaml

from public import public

from utrx.errors import ConfigurationError
from utrx.problems.suite import problem_names
from utrx.tools.typing import typechecked

DEFAULT_EPS = 1e-5
DEFAULT_TIME_LIMIT = 60.0
DEFAULT_SENTINEL = 20_000.0
DEFAULT_ITER_LIMIT = 20_000


@public
@dataclass(frozen=True)
class SolverSpec:
    """
    A solver entry of an experiment.

    Attributes
    ----------
    name : str
        Registry key of the method.
    label : str
        Name used in reports, file names and the summary table.
    options : dict
        Keyword options forwarded to the method.
    """

    name: str
    label: str = ""
    options: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.name:
            raise ConfigurationError("solver name must not be empty")
        if not self.label:
            object.__setattr__(self, "label", self.name)
        if not isinstance(self.options, dict):
            raise ConfigurationError(
                f"options of solver {self.name!r} must be a mapping"
            )

    @classmethod
    def from_mapping(cls, data: Union[str, Dict[str, Any]]) -> SolverSpec:
        """Build an entry from YAML, either a bare name or a mapping."""
        if isinstance(data, str):
            return cls(name=data)
        if not isinstance(data, dict) or "name" not in data:
            raise ConfigurationError(
                f"solver entry must be a name or a mapping with 'name': "
                f"{data!r}"
            )
        unknown = set(data) - {"name", "label", "options"}
        if unknown:
            raise ConfigurationError(
                f"unknown solver keys {sorted(unknown)}"
            )
        return cls(
            name=str(data["name"]),
            label=str(data.get("label") or ""),
            options=dict(data.get("options") or {}),
        )

    def to_mapping(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "label": self.label,
            "options": dict(self.options),
        }


@public
def default_solvers() -> List[SolverSpec]:
    """Return the standard comparison: UTR, aUTR, classical TR, RegNewton."""
    return [
        SolverSpec("utr", "UTR"),
        SolverSpec("autr", "aUTR"),
        SolverSpec("classic_tr", "classicTR"),
        SolverSpec("reg_newton", "RegNewton", {"lam": 1e-3}),
    ]


@public
@dataclass(frozen=True)
class ExperimentConfig:
    """A grid of solvers and problems with shared budgets."""

    solvers: List[SolverSpec] = field(default_factory=default_solvers)
    problems: List[str] = field(default_factory=problem_names)
    eps: float = DEFAULT_EPS
    time_limit: float = DEFAULT_TIME_LIMIT
    iter_limit: int = DEFAULT_ITER_LIMIT
    failure_sentinel: float = DEFAULT_SENTINEL
    output_dir: Path = Path("results")
    seed: int = 0
    workers: int = 1

    def __post_init__(self) -> None:
        if not self.solvers:
            raise ConfigurationError("at least one solver is required")
        if not self.problems:
            raise ConfigurationError("at least one problem is required")
        if not self.eps > 0:
            raise ConfigurationError(f"eps must be > 0, got {self.eps}")
        if not self.time_limit > 0:
            raise ConfigurationError("time_limit must be > 0")
        if self.iter_limit < 1:
            raise ConfigurationError("iter_limit must be >= 1")
        if not self.failure_sentinel > 0:
            raise ConfigurationError("failure_sentinel must be > 0")
        if self.workers < 1:
            raise ConfigurationError("workers must be >= 1")
        labels = [spec.label for spec in self.solvers]
        if len(set(labels)) != len(labels):
            raise ConfigurationError(f"solver labels must be unique: {labels}")
        object.__setattr__(self, "output_dir", Path(self.output_dir))

    @classmethod
    def from_mapping(cls, data: Dict[str, Any]) -> ExperimentConfig:
        """Build a configuration from the parsed YAML document."""
        known = {item.name for item in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(
                f"unknown configuration keys {sorted(unknown)}"
            )
        values = dict(data)
        if "solvers" in values:
            values["solvers"] = [
                SolverSpec.from_mapping(entry)
                for entry in values["solvers"] or []
            ]
        if "problems" in values:
            values["problems"] = [str(name) for name in values["problems"]]
        for key, kind in (
            ("eps", float),
            ("time_limit", float),
            ("failure_sentinel", float),
            ("iter_limit", int),
            ("seed", int),
            ("workers", int),
        ):
            if key in values:
                try:
                    values[key] = kind(values[key])
                except (TypeError, ValueError) as exc:
                    raise ConfigurationError(
                        f"{key} must be a number, got {values[key]!r}"
                    ) from exc
        if "output_dir" in values:
            values["output_dir"] = Path(values["output_dir"])
        return cls(**values)

    def to_mapping(self) -> Dict[str, Any]:
        """Return the configuration as plain YAML-friendly data."""
        return {
            "eps": self.eps,
            "time_limit": self.time_limit,
            "iter_limit": self.iter_limit,
            "failure_sentinel": self.failure_sentinel,
            "output_dir": str(self.output_dir),
            "seed": self.seed,
            "workers": self.workers,
            "solvers": [spec.to_mapping() for spec in self.solvers],
            "problems": list(self.problems),
        }

    def to_yaml(self) -> str:
        return str(yaml.safe_dump(self.to_mapping(), sort_keys=False))

    def with_overrides(self, **overrides: Any) -> ExperimentConfig:
        """Return a copy with every non-None override applied."""
        changes = {
            key: value for key, value in overrides.items() if value is not None
        }
        return dataclasses.replace(self, **changes)


@public
@typechecked
def load_config(
    path: Optional[Union[str, Path]] = None,
) -> ExperimentConfig:
    """
    Read an experiment configuration file.

    Without a path the defaults are returned.

    Raises
    ------
    ConfigurationError
        The file is missing, is not a YAML mapping or holds invalid values.
    """
    if path is None:
        return ExperimentConfig()
    source = Path(path)
    if not source.is_file():
        raise ConfigurationError(f"configuration file not found: {source}")
    try:
        data = yaml.safe_load(source.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"{source}: invalid YAML: {exc}") from exc
    if data is None:
        return ExperimentConfig()
    if not isinstance(data, dict):
        raise ConfigurationError(f"{source}: expected a mapping at top level")
    return ExperimentConfig.from_mapping(data)
