from .anisotropy import (
    AnisotropyNorm,
    EllipseNorm,
    EuclideanNorm,
    PNorm,
    ShiftedNorm,
    TabulatedNorm,
    check_uniform_ellipticity,
    eval_H,
    grad_H,
)
from .config import VERSION, NormSpec, QuadratureConfig, RunConfig
from .dual_geometry import DualGauge, WulffShape, dual_value, reversed_dual
from .run_context import RunContext
from .solution import LiouvilleSolution
from .suite import Suite
from .types import (
    CheckResult,
    ErrorCode,
    FinslerException,
    VerificationReport,
)

__version__ = VERSION

__all__ = [
    "AnisotropyNorm",
    "EllipseNorm",
    "EuclideanNorm",
    "PNorm",
    "ShiftedNorm",
    "TabulatedNorm",
    "check_uniform_ellipticity",
    "eval_H",
    "grad_H",
    "NormSpec",
    "QuadratureConfig",
    "RunConfig",
    "DualGauge",
    "WulffShape",
    "dual_value",
    "reversed_dual",
    "RunContext",
    "LiouvilleSolution",
    "Suite",
    "CheckResult",
    "ErrorCode",
    "FinslerException",
    "VerificationReport",
]
