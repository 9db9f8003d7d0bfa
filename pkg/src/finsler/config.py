import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import (
    BaseModel,
    Field,
    ValidationError,
    root_validator,
    validator,
)

from finsler.types import ConfigError, NormFamily

VERSION = "0.1.0"
MAX_DIMENSION = 6


def _read_thread_cap() -> int:
    raw = os.getenv("FL_THREADS")
    if raw is None:
        return max(1, os.cpu_count() or 1)
    try:
        value = int(raw)
    except ValueError:
        logging.warning(f"Ignoring non-integer FL_THREADS={raw!r}")
        return max(1, os.cpu_count() or 1)
    return max(1, value)


FL_THREADS = _read_thread_cap()


class NormSpec(BaseModel):
    """
    Parametric description of an anisotropy H, as read from a norm spec file.

    Examples of accepted JSON:
        {"dimension": 2, "family": "ellipse", "matrix": [[4, 0], [0, 1]]}
        {"family": "shifted", "b": [0.5, 0]}
        {"family": "pnorm", "p": 3}
        {"family": "custom_tabulated", "boundary_points": [[1, 0], ...]}

    The dimension may be omitted; it is inferred from ``matrix``/``b``, is 2
    for tabulated gauges, and is otherwise taken from the solution spec.
    """  # noqa: E501

    family: NormFamily = NormFamily.EUCLIDEAN
    dimension: Optional[int] = None
    matrix: Optional[List[List[float]]] = None
    p: Optional[float] = None
    b: Optional[List[float]] = None
    boundary_points: Optional[List[List[float]]] = None

    class Config:
        allow_mutation = False

    @root_validator(skip_on_failure=True)
    def check_family_parameters(cls, values):
        family = values["family"]
        dimension = values.get("dimension")
        inferred = None
        if family is NormFamily.ELLIPSE:
            matrix = values.get("matrix")
            if not matrix:
                raise ValueError("ellipse norm requires 'matrix'")
            if any(len(row) != len(matrix) for row in matrix):
                raise ValueError("'matrix' must be square")
            inferred = len(matrix)
        elif family is NormFamily.PNORM:
            if values.get("p") is None:
                raise ValueError("pnorm requires 'p'")
        elif family is NormFamily.SHIFTED:
            if not values.get("b"):
                raise ValueError("shifted norm requires 'b'")
            inferred = len(values["b"])
        elif family is NormFamily.CUSTOM_TABULATED:
            points = values.get("boundary_points")
            if not points or len(points) < 3:
                raise ValueError(
                    "custom_tabulated norm requires at least 3 boundary_points"
                )
            if any(len(point) != 2 for point in points):
                raise ValueError("custom_tabulated gauges are 2D only")
            inferred = 2
        if inferred is not None:
            if dimension is not None and dimension != inferred:
                raise ValueError(
                    f"dimension {dimension} does not match parameters "
                    f"of dimension {inferred}"
                )
            values["dimension"] = inferred
        if values.get("dimension") is not None and not (
            2 <= values["dimension"] <= MAX_DIMENSION
        ):
            raise ValueError(f"dimension must lie in [2, {MAX_DIMENSION}]")
        return values

    def with_dimension(self, dimension: int) -> "NormSpec":
        if self.dimension is None:
            return NormSpec(**{**self.dict(), "dimension": dimension})
        if self.dimension != dimension:
            raise ConfigError(
                f"norm dimension {self.dimension} differs from N={dimension}",
                output={"norm": self.dimension, "solution": dimension},
            )
        return self

    def to_dict(self) -> dict:
        data = self.dict(exclude_none=True)
        data["family"] = self.family.value
        return data


class SolutionSpec(BaseModel):
    """Parameters of the explicit family, e.g. {"N": 2, "lambda": 1.0}."""

    dimension: int = Field(2, alias="N")
    lam: float = Field(1.0, alias="lambda")
    center: Optional[List[float]] = None

    class Config:
        allow_population_by_field_name = True
        allow_mutation = False

    @validator("dimension")
    def check_dimension(cls, value):
        if not 2 <= value <= MAX_DIMENSION:
            raise ValueError(f"N must lie in [2, {MAX_DIMENSION}]")
        return value

    @validator("lam")
    def check_lambda(cls, value):
        if not value > 0.0:
            raise ValueError("lambda must be positive")
        return value

    @validator("center", always=True)
    def check_center(cls, value, values):
        dimension = values.get("dimension")
        if value is None:
            return [0.0] * dimension if dimension else None
        if dimension is not None and len(value) != dimension:
            raise ValueError(f"center must have {dimension} coordinates")
        return value

    def to_dict(self) -> dict:
        return {"N": self.dimension, "lambda": self.lam, "center": self.center}


class QuadratureConfig(BaseModel):
    relative_tolerance: float = 1e-9
    max_subdivisions: int = 2**15
    mc_samples: int = 2**22
    seed: int = 0

    class Config:
        allow_mutation = False

    @validator("relative_tolerance")
    def check_tolerance(cls, value):
        if not value > 0.0:
            raise ValueError("relative_tolerance must be positive")
        return value

    @validator("max_subdivisions")
    def check_subdivisions(cls, value):
        if value < 1:
            raise ValueError("max_subdivisions must be at least 1")
        return value

    @validator("mc_samples")
    def check_samples(cls, value):
        if value < 2**10:
            raise ValueError("mc_samples must be at least 1024")
        return value

    @validator("seed")
    def check_seed(cls, value):
        if not 0 <= value < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        return value

    def with_seed(self, seed: int) -> "QuadratureConfig":
        return QuadratureConfig(**{**self.dict(), "seed": seed})


class RunConfig(BaseModel):
    """
    Everything one verification run needs.

    Built from defaults, then a ``--config`` JSON file, then command-line
    flags (flags win). ``norm_path`` names a norm spec file that replaces
    ``norm`` when given.
    """

    norm: NormSpec = Field(default_factory=NormSpec)
    norm_path: Optional[str] = None
    solution: SolutionSpec = Field(default_factory=SolutionSpec)
    suites: List[str] = Field(default_factory=lambda: ["all"])
    quadrature: QuadratureConfig = Field(default_factory=QuadratureConfig)
    pohozaev_points: List[List[float]] = Field(default_factory=list)
    out: Optional[str] = None
    csv: Optional[str] = None
    deterministic: bool = False

    @root_validator(pre=True)
    def load_norm_file(cls, values):
        path = values.get("norm_path")
        if path:
            values["norm"] = load_json(path)
        return values

    @root_validator(skip_on_failure=True)
    def align_dimensions(cls, values):
        dimension = values["solution"].dimension
        try:
            values["norm"] = values["norm"].with_dimension(dimension)
        except ConfigError as e:
            raise ValueError(str(e))
        for y in values["pohozaev_points"]:
            if len(y) != dimension:
                raise ValueError(
                    f"Pohozaev points must have {dimension} coordinates"
                )
        return values

    @classmethod
    def from_sources(
        cls,
        config_path: Optional[str] = None,
        overrides: Optional[Dict[str, Any]] = None,
    ) -> "RunConfig":
        """
        Merge a config file with flag overrides and validate the result.

        Args:
            config_path (str, optional): JSON file with RunConfig fields.
            overrides (dict, optional): nested dict of flag values; ``None``
                entries are ignored so unset flags never mask the file.

        Raises:
            ConfigError: on unreadable files or any validation failure.
        """
        base = load_json(config_path) if config_path else {}
        merged = _deep_merge(base, _drop_none(overrides or {}))
        try:
            return cls.parse_obj(merged)
        except ValidationError as e:
            raise ConfigError(
                f"Invalid run configuration: {e}",
                output={"errors": e.errors()},
            )

    def snapshot(self) -> dict:
        return {
            "suites": sorted(self.suites),
            "quadrature": self.quadrature.dict(),
            "pohozaev_points": self.pohozaev_points,
        }


def load_json(path: str) -> Any:
    file = Path(path)
    if not file.is_file():
        raise ConfigError(f"File not found: {path}", output={"path": path})
    try:
        return json.loads(file.read_text())
    except json.JSONDecodeError as e:
        raise ConfigError(
            f"Malformed JSON in {path}: {e}", output={"path": path}
        )


def _drop_none(data: Dict[str, Any]) -> Dict[str, Any]:
    cleaned = {}
    for key, value in data.items():
        if isinstance(value, dict):
            value = _drop_none(value)
            if not value:
                continue
        if value is not None:
            cleaned[key] = value
    return cleaned


def _deep_merge(base: Dict[str, Any], top: Dict[str, Any]) -> Dict[str, Any]:
    merged = dict(base)
    for key, value in top.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged
