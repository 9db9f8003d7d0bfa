import math
from dataclasses import asdict, is_dataclass
from enum import Enum
from typing import Any, Callable, Tuple

import numpy as np
from pydantic import BaseModel

from finsler.types import BadParameter


def as_points(x, dimension: int) -> Tuple[np.ndarray, bool]:
    """
    Coerce ``x`` to a float array of shape (M, dimension).

    Returns:
        tuple: (points, single) where ``single`` tells whether the caller
        passed one vector and expects a scalar/vector back.

    Raises:
        BadParameter: if the trailing axis does not match ``dimension``.
    """
    points = np.asarray(x, dtype=float)
    single = points.ndim == 1
    points = np.atleast_2d(points)
    if points.ndim != 2 or points.shape[1] != dimension:
        raise BadParameter(
            f"Expected points of dimension {dimension}, got shape "
            f"{np.shape(x)}",
            output={"shape": list(np.shape(x)), "dimension": dimension},
        )
    return points, single


def restore(values: np.ndarray, single: bool):
    """Undo the batching of :func:`as_points` on a per-point result."""
    if not single:
        return values
    result = values[0]
    return float(result) if np.ndim(result) == 0 else result


def central_gradient(
    f: Callable[[np.ndarray], np.ndarray],
    points: np.ndarray,
    relative_step: float = 1e-6,
) -> np.ndarray:
    """Second-order central differences of a batched scalar map, step h = relative_step·|x|."""  # noqa: E501
    dimension = points.shape[1]
    h = relative_step * np.maximum(np.linalg.norm(points, axis=1), 1e-300)
    grad = np.empty_like(points)
    for i in range(dimension):
        shift = np.zeros_like(points)
        shift[:, i] = h
        grad[:, i] = (f(points + shift) - f(points - shift)) / (2.0 * h)
    return grad


def central_jacobian(
    f: Callable[[np.ndarray], np.ndarray],
    points: np.ndarray,
    relative_step: float = 1e-5,
) -> np.ndarray:
    """Central differences of a batched vector map, shape (M, N, N)."""
    dimension = points.shape[1]
    h = relative_step * np.maximum(np.linalg.norm(points, axis=1), 1e-300)
    jac = np.empty(points.shape + (dimension,))
    for j in range(dimension):
        shift = np.zeros_like(points)
        shift[:, j] = h
        jac[:, :, j] = (f(points + shift) - f(points - shift)) / (
            2.0 * h[:, None]
        )
    return 0.5 * (jac + np.swapaxes(jac, 1, 2))


def pairwise_sum(values: np.ndarray) -> float:
    """
    Tree summation with a fixed reduction order.

    The result depends only on the values and their order, so partitions
    reduced in a fixed order give bit-identical totals across runs.
    """
    values = np.asarray(values, dtype=float).reshape(-1)
    if values.size == 0:
        return 0.0
    while values.size > 1:
        if values.size % 2:
            values = np.append(values, 0.0)
        values = values[0::2] + values[1::2]
    return float(values[0])


def read_only(array) -> np.ndarray:
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


def parse_vector(text: str) -> list:
    """Parse a comma-separated vector flag such as ``0.3,-0.1``."""
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise BadParameter(
            f"Cannot parse vector {text!r}", output={"value": text}
        )


def validate_positive(name: str, value: float) -> None:
    if not np.isfinite(value) or value <= 0.0:
        raise BadParameter(
            f"{name} must be positive and finite", output={name: value}
        )


def validate_dimension(dimension: int) -> None:
    if not isinstance(dimension, (int, np.integer)) or dimension < 2:
        raise BadParameter(
            "Dimension must be an integer >= 2",
            output={"dimension": dimension},
        )


def serialize_data(data: Any) -> Any:
    """
    Recursively convert models, dataclasses and numpy values to JSON-ready
    data.

    Non-finite floats become the strings "inf", "-inf" and "nan" so the
    result is strict JSON.

    Examples:
        >>> serialize_data({"value": np.float64(1.5), "grid": np.arange(2)})
        {'value': 1.5, 'grid': [0, 1]}
    """  # noqa: E501
    if isinstance(data, BaseModel):
        return serialize_data(data.dict())
    elif hasattr(data, "to_dict") and not isinstance(data, type):
        return serialize_data(data.to_dict())
    elif is_dataclass(data) and not isinstance(data, type):
        return serialize_data(asdict(data))
    elif isinstance(data, Enum):
        return data.value
    elif isinstance(data, np.ndarray):
        return serialize_data(data.tolist())
    elif isinstance(data, np.generic):
        return serialize_data(data.item())
    elif isinstance(data, float) and not math.isfinite(data):
        return str(data)
    elif isinstance(data, dict):
        return {str(key): serialize_data(value) for key, value in data.items()}
    elif isinstance(data, (list, tuple)):
        return [serialize_data(item) for item in data]
    else:
        return data
