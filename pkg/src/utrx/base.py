"""Shared run types: step parameters, iteration records and run reports."""

import json
import time

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np
import yaml

from numpy.typing import NDArray
from plum import dispatch
from public import public

from utrx.errors import ConfigurationError
from utrx.tools.typing import typechecked

try:
    from typing_extensions import TypeAlias
except ImportError:
    from typing import TypeAlias  # type: ignore[no-redef,attr-defined]


__all__ = ["Matrix", "Vector"]

Vector: TypeAlias = NDArray[np.float64]
Matrix: TypeAlias = NDArray[np.float64]


@public
class RunStatus(Enum):
    """Terminal status of a solver run.

    ``Target`` is the optimality-gap stop of the accelerated method.
    """

    FOSP = "FOSP"
    SOSP = "SOSP"
    Target = "Target"
    MaxIter = "MaxIter"
    Failure = "Failure"


@public
class StepClass(Enum):
    """Label of an accepted iteration.

    ``F`` marks a sufficient function decrease, ``G`` a geometric
    contraction of the gradient norm.
    """

    F = "F-set"
    G = "G-set"


@public
@dataclass
class EvalCounters:
    """Oracle evaluation counts of one kind each."""

    f: int = 0
    g: int = 0
    h: int = 0
    hv: int = 0

    def as_dict(self) -> Dict[str, int]:
        return {"f": self.f, "g": self.g, "h": self.h, "hv": self.hv}

    def snapshot(self) -> "EvalCounters":
        return EvalCounters(self.f, self.g, self.h, self.hv)

    def since(self, start: "EvalCounters") -> Dict[str, int]:
        """Return the counts accumulated after ``start`` was taken."""
        return {
            "f": self.f - start.f,
            "g": self.g - start.g,
            "h": self.h - start.h,
            "hv": self.hv - start.hv,
        }


@public
@dataclass(frozen=True)
class StepParams:
    """Per-iteration regularization weight and radius scale.

    Attributes
    ----------
    sigma : float
        Weight of the gradient regularization term.
    r : float
        Radius scale; the realized radius is ``r * sqrt(||g||)``.
    rho : float, optional
        Adaptive penalty in effect when the step was computed.
    """

    sigma: float
    r: float
    rho: Optional[float] = None

    def __post_init__(self) -> None:
        if not self.sigma >= 0.0:
            raise ConfigurationError(f"sigma must be >= 0, got {self.sigma}")
        if not self.r > 0.0:
            raise ConfigurationError(f"r must be > 0, got {self.r}")
        if self.rho is not None and not self.rho > 0.0:
            raise ConfigurationError(f"rho must be > 0, got {self.rho}")


@public
@dataclass
class IterationRecord:
    """Log entry of one solver iteration."""

    k: int
    f_before: float
    f_after: float
    grad_norm_before: float
    grad_norm_after: float
    lam: float
    step_norm: float
    params: StepParams
    classification: Optional[StepClass] = None
    flags: Dict[str, bool] = field(default_factory=dict)
    retries: int = 0
    radius: float = 0.0
    lipschitz: Optional[float] = None
    lambda_min: Optional[float] = None
    branch: Optional[str] = None
    ratio: Optional[float] = None
    accepted: bool = True
    inner_iterations: int = 0
    wall_time: float = 0.0


@public
@dataclass
class OuterRecord:
    """Log entry of one outer iteration of the accelerated method."""

    k: int
    a: float
    A: float
    inner_iterations: int
    grad_h_norm: float
    delta: float
    f: float
    grad_norm: Optional[float] = None
    wall_time: float = 0.0


@dispatch
def to_builtin(value: np.ndarray) -> Any:
    """Convert ``value`` into plain JSON/YAML friendly Python objects."""
    return value.tolist()


@dispatch
def to_builtin(value: np.generic) -> Any:
    return value.item()


@dispatch
def to_builtin(value: Enum) -> Any:
    return value.value


@dispatch
def to_builtin(value: dict) -> Any:  # type: ignore[type-arg]
    return {str(key): to_builtin(item) for key, item in value.items()}


@dispatch
def to_builtin(value: list) -> Any:  # type: ignore[type-arg]
    return [to_builtin(item) for item in value]


@dispatch
def to_builtin(value: tuple) -> Any:  # type: ignore[type-arg]
    return [to_builtin(item) for item in value]


@dispatch
def to_builtin(value: object) -> Any:
    return value


def _record_to_dict(record: IterationRecord) -> Dict[str, Any]:
    data: Dict[str, Any] = {
        name: getattr(record, name)
        for name in record.__dataclass_fields__
        if name != "params"
    }
    data["params"] = {
        "sigma": record.params.sigma,
        "r": record.params.r,
        "rho": record.params.rho,
    }
    return to_builtin(data)  # type: ignore[no-any-return]


def _record_from_dict(data: Dict[str, Any]) -> IterationRecord:
    values = dict(data)
    values["params"] = StepParams(**values["params"])
    if values.get("classification") is not None:
        values["classification"] = StepClass(values["classification"])
    return IterationRecord(**values)


@public
@typechecked
@dataclass
class RunReport:
    """Outcome of one solver run on one problem instance."""

    method: str
    problem: str
    status: RunStatus
    x: Vector
    f: float
    grad_norm: float
    iterations: List[IterationRecord] = field(default_factory=list)
    counters: Dict[str, int] = field(default_factory=dict)
    wall_time: float = 0.0
    message: str = ""
    outer: List[OuterRecord] = field(default_factory=list)
    certificate: Optional[Dict[str, float]] = None

    @property
    def accepted(self) -> List[IterationRecord]:
        return [rec for rec in self.iterations if rec.accepted]

    @property
    def iteration_count(self) -> int:
        """Return the number of iterations, rejected ones included."""
        return len(self.iterations)

    @property
    def function_evaluations(self) -> int:
        return int(self.counters.get("f", 0))

    @property
    def gradient_evaluations(self) -> int:
        """Return gradient evaluations plus Hessian-vector products."""
        return int(self.counters.get("g", 0) + self.counters.get("hv", 0))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "method": self.method,
            "problem": self.problem,
            "status": self.status.value,
            "x": to_builtin(self.x),
            "f": float(self.f),
            "grad_norm": float(self.grad_norm),
            "iterations": [_record_to_dict(rec) for rec in self.iterations],
            "counters": to_builtin(self.counters),
            "wall_time": float(self.wall_time),
            "message": self.message,
            "outer": [
                to_builtin(
                    {
                        name: getattr(rec, name)
                        for name in rec.__dataclass_fields__
                    }
                )
                for rec in self.outer
            ],
            "certificate": to_builtin(self.certificate),
        }

    def to_json(self, indent: int = 2) -> str:
        """Return the report as a JSON document."""
        return json.dumps(self.to_dict(), indent=indent)

    def to_yaml(self) -> str:
        """Return the report as a YAML document."""
        return str(yaml.dump(self.to_dict(), sort_keys=False))

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunReport":
        """Rebuild a report written by ``to_dict``."""
        return cls(
            method=str(data["method"]),
            problem=str(data["problem"]),
            status=RunStatus(data["status"]),
            x=np.asarray(data["x"], dtype=np.float64),
            f=float(data["f"]),
            grad_norm=float(data["grad_norm"]),
            iterations=[_record_from_dict(rec) for rec in data["iterations"]],
            counters={
                key: int(value)
                for key, value in data.get("counters", {}).items()
            },
            wall_time=float(data.get("wall_time", 0.0)),
            message=str(data.get("message", "")),
            outer=[OuterRecord(**rec) for rec in data.get("outer", [])],
            certificate=data.get("certificate"),
        )


@public
class RunClock:
    """Wall clock of a solver run with an optional time limit."""

    def __init__(self, time_limit: Optional[float] = None) -> None:
        if time_limit is not None and not time_limit > 0:
            raise ConfigurationError(
                f"time_limit must be > 0, got {time_limit}"
            )
        self.time_limit = time_limit
        self.start = time.perf_counter()

    def elapsed(self) -> float:
        return time.perf_counter() - self.start

    def expired(self) -> bool:
        return self.time_limit is not None and self.elapsed() > self.time_limit
