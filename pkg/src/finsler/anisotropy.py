"""
Anisotropic gauges H: positively 1-homogeneous convex functions on R^N.

Every gauge evaluates on a single vector or on a batch of shape (M, N) and
returns a scalar or vector per point. Gauges are immutable once built and
safe to share between threads.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from finsler._internal.sphere import quasi_uniform_sphere
from finsler._internal.utils import (
    as_points,
    central_gradient,
    central_jacobian,
    read_only,
    restore,
    validate_dimension,
)
from finsler.config import NormSpec, load_json
from finsler.types import BadParameter, NormFamily, ZeroVector

ZERO_THRESHOLD = 1e-14
ELLIPTICITY_THRESHOLD = 1e-8
MAX_SHIFT = 0.999


class AnisotropyNorm(ABC):
    """
    Base class of the gauge families.

    Subclasses implement the batched kernels ``_value``, ``_gradient`` and
    ``_hessian_H2`` on arrays of nonzero points of shape (M, N); the public
    methods take care of shapes and of the zero-vector guard.

    Args:
        dimension (int): ambient dimension N >= 2.

    Raises:
        BadParameter: for invalid family parameters.
    """

    family: NormFamily
    smooth: bool = True

    def __init__(self, dimension: int):
        validate_dimension(dimension)
        self.dimension = int(dimension)

    def value(self, xi):
        points, single = self._nonzero(xi)
        return restore(self._value(points), single)

    def gradient(self, xi):
        points, single = self._nonzero(xi)
        return restore(self._gradient(points), single)

    def hessian_H2(self, xi):
        points, single = self._nonzero(xi)
        return restore(self._hessian_H2(points), single)

    @abstractmethod
    def _value(self, points: np.ndarray) -> np.ndarray:
        ...

    @abstractmethod
    def _gradient(self, points: np.ndarray) -> np.ndarray:
        ...

    def _hessian_H2(self, points: np.ndarray) -> np.ndarray:
        def grad_h2(p):
            return 2.0 * self._value(p)[:, None] * self._gradient(p)

        return central_jacobian(grad_h2, points)

    def _nonzero(self, xi):
        points, single = as_points(xi, self.dimension)
        lengths = np.linalg.norm(points, axis=1)
        if np.any(lengths <= ZERO_THRESHOLD):
            raise ZeroVector(
                "Gauge evaluated at the zero vector",
                output={"min_length": float(lengths.min())},
            )
        return points, single

    def to_spec(self) -> dict:
        return {"family": self.family.value, "dimension": self.dimension}

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.to_spec()})"


def _hessian_from_gradient(
    value: np.ndarray, grad: np.ndarray, hess_h: np.ndarray
) -> np.ndarray:
    # Hess(H^2) = 2 (grad H grad H^T + H Hess H)
    outer = grad[:, :, None] * grad[:, None, :]
    return 2.0 * (outer + value[:, None, None] * hess_h)


class EuclideanNorm(AnisotropyNorm):
    family = NormFamily.EUCLIDEAN

    def _value(self, points):
        return np.linalg.norm(points, axis=1)

    def _gradient(self, points):
        return points / self._value(points)[:, None]

    def _hessian_H2(self, points):
        return np.broadcast_to(
            2.0 * np.eye(self.dimension),
            (len(points), self.dimension, self.dimension),
        ).copy()


class EllipseNorm(AnisotropyNorm):
    """H(xi) = sqrt(xi^T A xi) for a symmetric positive-definite A."""

    family = NormFamily.ELLIPSE

    def __init__(self, matrix):
        matrix = np.asarray(matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise BadParameter(
                "Ellipse matrix must be square",
                output={"shape": list(matrix.shape)},
            )
        super().__init__(matrix.shape[0])
        scale = max(np.abs(matrix).max(), 1.0)
        if not np.allclose(matrix, matrix.T, atol=1e-12 * scale):
            raise BadParameter(
                "Ellipse matrix must be symmetric",
                output={"matrix": matrix.tolist()},
            )
        eigenvalues = np.linalg.eigvalsh(matrix)
        if eigenvalues.min() <= 0.0:
            raise BadParameter(
                "Ellipse matrix must be positive definite",
                output={"eigenvalues": eigenvalues.tolist()},
            )
        self.matrix = read_only(matrix)
        self.inverse = read_only(np.linalg.inv(matrix))

    def _value(self, points):
        quad = np.einsum("mi,ij,mj->m", points, self.matrix, points)
        return np.sqrt(quad)

    def _gradient(self, points):
        return (points @ self.matrix) / self._value(points)[:, None]

    def _hessian_H2(self, points):
        return np.broadcast_to(
            2.0 * self.matrix, (len(points),) + self.matrix.shape
        ).copy()

    def to_spec(self):
        return {**super().to_spec(), "matrix": self.matrix.tolist()}


class PNorm(AnisotropyNorm):
    """
    The l^p norm, p > 1.

    For p > 2 the Hessian of H^2 degenerates on the coordinate axes, so the
    uniform-ellipticity verdict is false there; the gauge is still usable.
    """

    family = NormFamily.PNORM

    def __init__(self, dimension: int, p: float):
        super().__init__(dimension)
        if not np.isfinite(p) or p <= 1.0:
            raise BadParameter(
                "pnorm exponent must satisfy p > 1", output={"p": p}
            )
        self.p = float(p)

    @property
    def conjugate(self) -> float:
        return self.p / (self.p - 1.0)

    def _value(self, points):
        scale = np.abs(points).max(axis=1)
        ratio = np.abs(points) / scale[:, None]
        return scale * np.sum(ratio**self.p, axis=1) ** (1.0 / self.p)

    def _gradient(self, points):
        h = self._value(points)
        ratio = np.abs(points) / h[:, None]
        return np.sign(points) * ratio ** (self.p - 1.0)

    def _hessian_H2(self, points):
        h = self._value(points)
        g = self._gradient(points)
        ratio = np.abs(points) / h[:, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            diag = ratio ** (self.p - 2.0)
        eye = np.eye(self.dimension)
        hess_h = (self.p - 1.0) / h[:, None, None] * (
            diag[:, :, None] * eye - g[:, :, None] * g[:, None, :]
        )
        return _hessian_from_gradient(h, g, hess_h)

    def to_spec(self):
        return {**super().to_spec(), "p": self.p}


class ShiftedNorm(AnisotropyNorm):
    """H(xi) = |xi| + <b, xi>, an asymmetric gauge for |b| < 0.999."""

    family = NormFamily.SHIFTED

    def __init__(self, b):
        b = np.asarray(b, dtype=float).reshape(-1)
        super().__init__(len(b))
        if not np.linalg.norm(b) < MAX_SHIFT:
            raise BadParameter(
                f"Shift vector must satisfy |b| < {MAX_SHIFT}",
                output={"b": b.tolist(), "length": float(np.linalg.norm(b))},
            )
        self.b = read_only(b)

    @property
    def beta(self) -> float:
        return 1.0 - float(self.b @ self.b)

    def _value(self, points):
        return np.linalg.norm(points, axis=1) + points @ self.b

    def _gradient(self, points):
        length = np.linalg.norm(points, axis=1)
        return points / length[:, None] + self.b

    def _hessian_H2(self, points):
        length = np.linalg.norm(points, axis=1)
        unit = points / length[:, None]
        eye = np.eye(self.dimension)
        hess_h = (eye - unit[:, :, None] * unit[:, None, :]) / length[
            :, None, None
        ]
        return _hessian_from_gradient(
            self._value(points), self._gradient(points), hess_h
        )

    def to_spec(self):
        return {**super().to_spec(), "b": self.b.tolist()}


class TabulatedNorm(AnisotropyNorm):
    """
    Minkowski gauge of a convex polygon containing the origin (2D only).

    ``boundary_points`` trace the unit H-ball boundary as a closed polyline;
    H(xi) = max_i <n_i, xi> / h_i over the polygon's edges, with n_i the
    outer unit normal and h_i the distance of edge i from the origin.
    The gradient comes from central differences with step 1e-6·|xi|.
    """

    family = NormFamily.CUSTOM_TABULATED
    smooth = False

    def __init__(self, boundary_points):
        points = np.asarray(boundary_points, dtype=float)
        if points.ndim != 2 or points.shape[1] != 2:
            raise BadParameter(
                "Tabulated gauges take 2D boundary points",
                output={"shape": list(points.shape)},
            )
        super().__init__(2)
        if len(points) < 3:
            raise BadParameter(
                "At least 3 boundary points are required",
                output={"count": len(points)},
            )
        try:
            hull = ConvexHull(points)
        except QhullError as e:
            raise BadParameter(
                f"Degenerate boundary polygon: {e}",
                output={"points": points.tolist()},
            )
        normals = hull.equations[:, :2]
        offsets = -hull.equations[:, 2]
        # every tabulated point must lie on the hull boundary
        slack = points @ normals.T - offsets
        if np.any(slack.max(axis=1) < -1e-9 * np.abs(points).max()):
            raise BadParameter(
                "Boundary polygon is not convex",
                output={"points": points.tolist()},
            )
        if np.any(offsets <= 1e-12):
            raise BadParameter(
                "Boundary polygon must contain the origin in its interior",
                output={"min_offset": float(offsets.min())},
            )
        self.boundary_points = read_only(points[hull.vertices])
        self.normals = read_only(normals)
        self.offsets = read_only(offsets)

    def _value(self, points):
        facets = self.normals / self.offsets[:, None]
        return np.max(points @ facets.T, axis=1)

    def _gradient(self, points):
        return central_gradient(self._value, points, relative_step=1e-6)

    def to_spec(self):
        return {
            **super().to_spec(),
            "boundary_points": self.boundary_points.tolist(),
        }


@dataclass(frozen=True)
class EllipticityVerdict:
    lambda_min: float
    lambda_max: float
    verdict: bool
    n_samples: int
    worst_direction: Optional[list] = None

    def to_dict(self) -> dict:
        return {
            "lambda_min": self.lambda_min,
            "lambda_max": self.lambda_max,
            "verdict": self.verdict,
            "n_samples": self.n_samples,
            "worst_direction": self.worst_direction,
        }


def eval_H(norm: AnisotropyNorm, xi):
    """
    Evaluate H(xi) > 0.

    Args:
        norm (AnisotropyNorm): the gauge.
        xi: a nonzero vector, or a batch of shape (M, N).

    Returns:
        float | np.ndarray: H at each point.

    Raises:
        ZeroVector: if |xi| <= 1e-14.

    Example:
        >>> eval_H(ShiftedNorm([0.5, 0.0]), [-1.0, 0.0])
        0.5
    """
    return norm.value(xi)


def grad_H(norm: AnisotropyNorm, xi):
    """Gradient of H; closed form per family, central differences for tabulated gauges."""  # noqa: E501
    return norm.gradient(xi)


def check_uniform_ellipticity(
    norm: AnisotropyNorm, n_samples: int = 1000
) -> EllipticityVerdict:
    """
    Sample the spectrum of Hess(H^2) over the unit sphere.

    The sample set is ``n_samples`` quasi-uniform directions plus the signed
    coordinate axes, where the pnorm family degenerates for p > 2. The
    verdict is ``lambda_min > 1e-8`` with a finite ``lambda_max``; a false
    verdict is logged and returned, never raised.

    Raises:
        BadParameter: if ``n_samples < 100``.
    """
    if n_samples < 100:
        raise BadParameter(
            "Ellipticity check needs at least 100 samples",
            output={"n_samples": n_samples},
        )
    eye = np.eye(norm.dimension)
    directions = np.vstack(
        [quasi_uniform_sphere(n_samples, norm.dimension), eye, -eye]
    )
    hessians = norm.hessian_H2(directions)
    finite = np.all(np.isfinite(hessians), axis=(1, 2))
    lambda_max = np.inf
    lambda_min = np.inf
    worst = None
    if finite.any():
        eigenvalues = np.linalg.eigvalsh(hessians[finite])
        lows = eigenvalues[:, 0]
        lambda_min = float(lows.min())
        worst = directions[finite][int(np.argmin(lows))].tolist()
        if finite.all():
            lambda_max = float(eigenvalues[:, -1].max())
    verdict = bool(
        lambda_min > ELLIPTICITY_THRESHOLD and np.isfinite(lambda_max)
    )
    if not verdict:
        logging.warning(
            f"Uniform ellipticity fails for {norm!r}: "
            f"lambda_min={lambda_min:.3e}, lambda_max={lambda_max:.3e}"
        )
    return EllipticityVerdict(
        lambda_min=lambda_min,
        lambda_max=lambda_max,
        verdict=verdict,
        n_samples=len(directions),
        worst_direction=worst,
    )


def norm_from_spec(spec: NormSpec, dimension: Optional[int] = None):
    """Build the gauge a NormSpec describes; ``dimension`` fills in a missing one."""  # noqa: E501
    if spec.dimension is None and dimension is None:
        raise BadParameter(
            f"Norm family {spec.family.value} needs a dimension",
            output=spec.to_dict(),
        )
    n = spec.dimension if spec.dimension is not None else dimension
    if spec.family is NormFamily.EUCLIDEAN:
        return EuclideanNorm(n)
    if spec.family is NormFamily.ELLIPSE:
        return EllipseNorm(spec.matrix)
    if spec.family is NormFamily.PNORM:
        return PNorm(n, spec.p)
    if spec.family is NormFamily.SHIFTED:
        return ShiftedNorm(spec.b)
    return TabulatedNorm(spec.boundary_points)


def load_norm(path: str, dimension: Optional[int] = None) -> AnisotropyNorm:
    return norm_from_spec(NormSpec.parse_obj(load_json(path)), dimension)
