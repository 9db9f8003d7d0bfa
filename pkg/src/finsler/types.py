import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np

Scalars = Union[float, List[float]]


class ErrorCode(Enum):
    ZERO_VECTOR = "zero_vector"
    BAD_PARAMETER = "bad_parameter"
    OPTIMIZER_DIVERGED = "optimizer_diverged"
    NO_CONVERGENCE = "no_convergence"
    TOLERANCE_NOT_MET = "tolerance_not_met"
    ABOVE_MAXIMUM = "above_maximum"
    DEGENERATE_REGION = "degenerate_region"
    BAD_BOUNDARY = "bad_boundary"
    ROOT_FIND_FAILURE = "root_find_failure"
    CONFIG_ERROR = "config_error"


INPUT_ERRORS = {
    ErrorCode.ZERO_VECTOR,
    ErrorCode.BAD_PARAMETER,
    ErrorCode.ABOVE_MAXIMUM,
    ErrorCode.BAD_BOUNDARY,
    ErrorCode.CONFIG_ERROR,
}


class FinslerException(Exception):
    """Base error of the toolkit.

    Args:
        code (ErrorCode): machine-readable error kind.
        output (Any): JSON-ready payload, e.g. the best estimate reached
            before a numerical routine gave up.
    """

    code: ErrorCode = ErrorCode.BAD_PARAMETER

    def __init__(self, message: str, output: Any = None):
        super().__init__(message)
        self.output = output if output is not None else {}

    @property
    def status_code(self) -> int:
        """HTTP status for the error: 422 for bad input, 500 otherwise."""
        return 422 if self.code in INPUT_ERRORS else 500

    def to_dict(self) -> dict:
        return {
            "code": self.code.value,
            "message": str(self),
            "output": self.output,
        }


class ZeroVector(FinslerException):
    code = ErrorCode.ZERO_VECTOR


class BadParameter(FinslerException):
    code = ErrorCode.BAD_PARAMETER


class OptimizerDiverged(FinslerException):
    code = ErrorCode.OPTIMIZER_DIVERGED


class NoConvergence(FinslerException):
    code = ErrorCode.NO_CONVERGENCE


class ToleranceNotMet(FinslerException):
    code = ErrorCode.TOLERANCE_NOT_MET


class AboveMaximum(FinslerException):
    code = ErrorCode.ABOVE_MAXIMUM


class DegenerateRegion(FinslerException):
    code = ErrorCode.DEGENERATE_REGION


class BadBoundary(FinslerException):
    code = ErrorCode.BAD_BOUNDARY


class RootFindFailure(FinslerException):
    code = ErrorCode.ROOT_FIND_FAILURE


class ConfigError(FinslerException):
    code = ErrorCode.CONFIG_ERROR


@dataclass
class ErrorResponse:
    output: Any


@dataclass(frozen=True)
class QuadratureResult:
    """Outcome of a deterministic quadrature.

    ``error`` is the achieved error estimate; ``converged`` tells whether
    it met the requested tolerance before the node or subdivision cap.
    """

    value: float
    error: float
    converged: bool
    evaluations: int

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "error": self.error,
            "converged": self.converged,
            "evaluations": self.evaluations,
        }


@dataclass(frozen=True)
class MonteCarloEstimate:
    value: float
    std_error: float
    samples: int
    seed: int

    def sigmas_from(self, target: float) -> float:
        """Distance to ``target`` in units of the standard error."""
        if self.std_error == 0.0:
            same = math.isclose(self.value, target, rel_tol=1e-12)
            return 0.0 if same else float("inf")
        return abs(self.value - target) / self.std_error

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "std_error": self.std_error,
            "samples": self.samples,
            "seed": self.seed,
        }


class CheckStatus(Enum):
    STARTED = "started"
    COMPLETED = "completed"
    FAILED = "failed"
    SKIPPED = "skipped"


class Comparison(Enum):
    EQUAL = "equal"
    AT_LEAST = "at_least"
    AT_MOST = "at_most"


def check_log_to_dict(log: "CheckLog") -> dict:
    """Convert a CheckLog instance to a dictionary with enum handling"""
    return {
        "status": log.status.value if log.status else None,
        "check": log.check,
        "elapsed": log.elapsed,
        "error": log.error,
        "timestamp": (
            log.timestamp.replace(tzinfo=timezone.utc).isoformat()
            if log.timestamp
            else None
        ),
    }


@dataclass
class CheckLog:
    status: CheckStatus
    check: str
    elapsed: Optional[float] = None
    error: Optional[dict] = None
    timestamp: datetime = field(
        default_factory=lambda: datetime.now(timezone.utc)
    )

    def to_dict(self):
        """Convert CheckLog to a dictionary for JSON serialization"""
        return check_log_to_dict(self)


def _plain(values: np.ndarray) -> Scalars:
    if values.size == 1:
        return float(values.reshape(-1)[0])
    return [float(v) for v in values.reshape(-1)]


@dataclass
class CheckResult:
    """Pass/fail record of one identity check.

    For ``Comparison.EQUAL`` the errors are ``|computed - target|`` and its
    ratio to ``|target|``; where the target is zero the relative error
    falls back to the absolute one. For the inequality comparisons both
    errors measure the violation (zero when the inequality holds). In all
    cases ``passed`` is ``rel_err <= tolerance``.

    With a scalar tolerance the errors are the worst over all components.
    A per-component tolerance keeps the errors per component as well, and
    ``passed`` requires every component to meet its own tolerance.
    """

    name: str
    anchor: str
    computed: Scalars
    target: Scalars
    abs_err: Scalars
    rel_err: Scalars
    tolerance: Scalars
    passed: bool
    comparison: Comparison = Comparison.EQUAL
    seed: Optional[int] = None
    details: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def compare(
        cls,
        name: str,
        anchor: str,
        computed: Union[float, Sequence[float], np.ndarray],
        target: Union[float, Sequence[float], np.ndarray],
        tolerance: Union[float, Sequence[float]],
        comparison: Comparison = Comparison.EQUAL,
        seed: Optional[int] = None,
        details: Optional[dict] = None,
    ) -> "CheckResult":
        c = np.atleast_1d(np.asarray(computed, dtype=float))
        t = np.broadcast_to(
            np.atleast_1d(np.asarray(target, dtype=float)), c.shape
        )
        if comparison is Comparison.EQUAL:
            abs_err = np.abs(c - t)
        elif comparison is Comparison.AT_LEAST:
            abs_err = np.maximum(t - c, 0.0)
        else:
            abs_err = np.maximum(c - t, 0.0)
        scale = np.abs(t)
        with np.errstate(divide="ignore", invalid="ignore"):
            rel_err = np.where(scale > 0.0, abs_err / scale, abs_err)
        broken = ~(np.isfinite(c) & np.isfinite(t))
        abs_err = np.where(broken, np.inf, abs_err)
        rel_err = np.where(broken, np.inf, rel_err)
        tol = np.atleast_1d(np.asarray(tolerance, dtype=float))
        if tol.size == 1:
            abs_out, rel_out = float(abs_err.max()), float(rel_err.max())
            passed = rel_out <= float(tol[0])
            tol_out = float(tol[0])
        else:
            tol = np.broadcast_to(tol, c.shape)
            passed = bool(np.all(rel_err <= tol))
            abs_out, rel_out = _plain(abs_err), _plain(rel_err)
            tol_out = _plain(np.asarray(tol))
        return cls(
            name=name,
            anchor=anchor,
            computed=_plain(c),
            target=_plain(np.asarray(t)),
            abs_err=abs_out,
            rel_err=rel_out,
            tolerance=tol_out,
            passed=bool(passed),
            comparison=comparison,
            seed=seed,
            details=details or {},
        )

    @classmethod
    def from_failure(
        cls,
        name: str,
        anchor: str,
        tolerance: Scalars,
        error: "FinslerException",
        seed: Optional[int] = None,
    ) -> "CheckResult":
        return cls(
            name=name,
            anchor=anchor,
            computed=float("nan"),
            target=float("nan"),
            abs_err=float("inf"),
            rel_err=float("inf"),
            tolerance=tolerance,
            passed=False,
            seed=seed,
            details={"error": error.to_dict()},
        )

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "anchor": self.anchor,
            "computed": self.computed,
            "target": self.target,
            "abs_err": self.abs_err,
            "rel_err": self.rel_err,
            "tol": self.tolerance,
            "passed": self.passed,
            "comparison": self.comparison.value,
            "seed": self.seed,
            "details": self.details,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CheckResult":
        return cls(
            name=data["name"],
            anchor=data["anchor"],
            computed=data["computed"],
            target=data["target"],
            abs_err=data["abs_err"],
            rel_err=data["rel_err"],
            tolerance=data["tol"],
            passed=data["passed"],
            comparison=Comparison(data.get("comparison", "equal")),
            seed=data.get("seed"),
            details=data.get("details", {}),
        )


@dataclass
class VerificationReport:
    version: str
    norm: dict
    solution: dict
    config: dict
    checks: List[CheckResult] = field(default_factory=list)
    timings: Dict[str, float] = field(default_factory=dict)
    log: List[CheckLog] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def to_dict(self, deterministic: bool = False) -> dict:
        """Serialize the report; deterministic mode drops wall-clock data."""
        data = {
            "version": self.version,
            "norm": self.norm,
            "solution": self.solution,
            "config": self.config,
            "checks": [
                c.to_dict() for c in sorted(self.checks, key=lambda c: c.name)
            ],
            "passed": self.passed,
        }
        if not deterministic:
            data["timings"] = dict(sorted(self.timings.items()))
            data["log"] = [entry.to_dict() for entry in self.log]
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "VerificationReport":
        return cls(
            version=data.get("version", ""),
            norm=data.get("norm", {}),
            solution=data.get("solution", {}),
            config=data.get("config", {}),
            checks=[CheckResult.from_dict(c) for c in data.get("checks", [])],
            timings=data.get("timings", {}),
        )


class NormFamily(Enum):
    EUCLIDEAN = "euclidean"
    ELLIPSE = "ellipse"
    PNORM = "pnorm"
    SHIFTED = "shifted"
    CUSTOM_TABULATED = "custom_tabulated"


class DualMode(Enum):
    CLOSED_FORM = "closed_form"
    OPTIMIZED = "optimized"
