"""
The Finsler p-Laplacian Δ_p^H u = div(H^{p-1}(grad u) grad H(grad u)).

The flux is evaluated from an exact gradient; only the outer divergence is
taken by central differences, then Richardson-extrapolated.
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from finsler._internal.utils import as_points, restore
from finsler.anisotropy import AnisotropyNorm
from finsler.dual_geometry import DualGauge
from finsler.solution import LiouvilleSolution
from finsler.types import BadParameter, DegenerateRegion

FLUX_THRESHOLD = 1e-12
STENCIL_THRESHOLD = 1e-10
RESIDUAL_RANGE = (1e-2, 1e3)

GradientSource = Callable[[np.ndarray], np.ndarray]
Number = Union[float, np.ndarray]


@dataclass(frozen=True)
class StencilEstimate:
    """Richardson value with the raw stencil values it was built from."""

    value: Number
    coarse: Number
    fine: Number
    step: Number


@dataclass(frozen=True)
class ResidualEstimate:
    residual: Number
    coarse: Number
    fine: Number
    exp_u: Number
    order: Number

    @property
    def relative(self) -> Number:
        return np.abs(self.residual) / self.exp_u


@dataclass(frozen=True)
class FluxField:
    norm: AnisotropyNorm
    p: float
    gradient_source: GradientSource

    def __post_init__(self):
        if not self.p > 1.0:
            raise BadParameter(
                "Flux exponent must satisfy p > 1", output={"p": self.p}
            )

    @classmethod
    def from_solution(
        cls, sol: LiouvilleSolution, p: Optional[float] = None
    ) -> "FluxField":
        """The N-Laplacian flux of the explicit solution, for its own gauge."""
        p = float(sol.dimension) if p is None else p
        return cls(sol.gauge.base, p, sol.gradient)

    @classmethod
    def from_scalar(
        cls,
        norm: AnisotropyNorm,
        p: float,
        u: Callable[[np.ndarray], np.ndarray],
        step: float = 1e-6,
    ) -> "FluxField":
        """Flux of a scalar field whose gradient is taken by central differences."""  # noqa: E501

        def gradient(points):
            points, single = as_points(points, norm.dimension)
            h = step * (1.0 + np.linalg.norm(points, axis=1))
            grad = np.empty_like(points)
            for i in range(norm.dimension):
                shift = np.zeros_like(points)
                shift[:, i] = h
                grad[:, i] = (u(points + shift) - u(points - shift)) / (2 * h)
            return restore(grad, single)

        return cls(norm, p, gradient)

    def gradient(self, points: np.ndarray) -> np.ndarray:
        return np.atleast_2d(self.gradient_source(points))

    def flux(self, x):
        points, single = as_points(x, self.norm.dimension)
        g = self.gradient(points)
        out = np.zeros_like(points)
        live = np.linalg.norm(g, axis=1) >= FLUX_THRESHOLD
        if live.any():
            h = self.norm.value(g[live])
            out[live] = h[:, None] ** (self.p - 1.0) * self.norm.gradient(
                g[live]
            )
        return restore(out, single)


def flux(field: FluxField, x):
    """
    F(x) = H^{p-1}(g) grad H(g) with g = grad u(x); zero where |g| < 1e-12.

    Example:
        >>> field = FluxField(EuclideanNorm(2), 2.0, np.atleast_2d)
        >>> flux(field, [3.0, 4.0])
        array([3., 4.])
    """
    return field.flux(x)


def _divergence(field: FluxField, points: np.ndarray, h: np.ndarray):
    n = field.norm.dimension
    total = np.zeros(len(points))
    for i in range(n):
        shift = np.zeros_like(points)
        shift[:, i] = h
        stencil = np.vstack([points + shift, points - shift])
        g = field.gradient(stencil)
        if np.any(np.linalg.norm(g, axis=1) < STENCIL_THRESHOLD):
            raise DegenerateRegion(
                "Gradient vanishes on the divergence stencil",
                output={"points": points.tolist(), "step": h.tolist()},
            )
        f = field.flux(stencil)[:, i]
        total += (f[: len(points)] - f[len(points) :]) / (2.0 * h)
    return total


def finsler_p_laplacian(
    field: FluxField, x, h: Optional[float] = None, richardson: bool = True
) -> StencilEstimate:
    """
    Central-difference divergence of the analytic flux.

    Args:
        field (FluxField): the flux to differentiate.
        x: a point or an (M, N) batch, away from critical points of u.
        h (float, optional): stencil step; defaults to 1e-4·(1 + |x|).
        richardson (bool): combine steps h and h/2 as (4 D_{h/2} - D_h)/3.

    Returns:
        StencilEstimate: ``value`` is the extrapolated divergence (or the
        raw step-h value without Richardson).

    Raises:
        DegenerateRegion: if |grad u| < 1e-10 at any stencil point.
    """
    points, single = as_points(x, field.norm.dimension)
    if h is None:
        step = 1e-4 * (1.0 + np.linalg.norm(points, axis=1))
    else:
        step = np.full(len(points), float(h))
    coarse = _divergence(field, points, step)
    if richardson:
        fine = _divergence(field, points, 0.5 * step)
        value = (4.0 * fine - coarse) / 3.0
    else:
        fine = coarse
        value = coarse
    return StencilEstimate(
        value=restore(value, single),
        coarse=restore(coarse, single),
        fine=restore(fine, single),
        step=restore(step, single),
    )


def pde_residual(
    sol: LiouvilleSolution, x, h: Optional[float] = None
) -> ResidualEstimate:
    """
    r(x) = -Δ_N^H u(x) - e^{u(x)} for the explicit solution.

    The coarse/fine residuals come from steps h and h/2; ``order`` is
    log2(|r_h| / |r_{h/2}|), close to 2 for the second-order stencil.

    Raises:
        DegenerateRegion: if Ĥ0(x - x0) lies outside [1e-2, 1e3].
    """
    points, single = as_points(x, sol.dimension)
    rho = np.atleast_1d(sol.wulff_radius(points))
    low, high = RESIDUAL_RANGE
    if np.any((rho < low) | (rho > high)):
        raise DegenerateRegion(
            f"Residual points must satisfy {low} <= Ĥ0(x - x0) <= {high}",
            output={"rho_min": float(rho.min()), "rho_max": float(rho.max())},
        )
    estimate = finsler_p_laplacian(FluxField.from_solution(sol), points, h)
    exp_u = np.exp(sol.profile(rho))
    residual = -estimate.value - exp_u
    coarse = -estimate.coarse - exp_u
    fine = -estimate.fine - exp_u
    with np.errstate(divide="ignore", invalid="ignore"):
        order = np.log2(np.abs(coarse) / np.abs(fine))
    return ResidualEstimate(
        residual=restore(residual, single),
        coarse=restore(coarse, single),
        fine=restore(fine, single),
        exp_u=restore(exp_u, single),
        order=restore(order, single),
    )


def convergence_order(coarse, fine) -> float:
    """Empirical order from RMS residuals at steps h and h/2."""
    rms_coarse = math.sqrt(float(np.mean(np.square(coarse))))
    rms_fine = math.sqrt(float(np.mean(np.square(fine))))
    if rms_fine == 0.0:
        return math.inf
    return math.log2(rms_coarse / rms_fine)


def classical_p_laplacian(
    u: Callable[[np.ndarray], np.ndarray], x, p: float, h: float = 1e-3
):
    """
    div(|grad u|^{p-2} grad u) by nested central differences on u alone.

    Independent of the gauge machinery; used as the euclidean oracle.
    """
    points, single = as_points(x, np.shape(np.atleast_2d(x))[1])
    n = points.shape[1]

    def grad(q, step):
        out = np.empty_like(q)
        for i in range(n):
            shift = np.zeros_like(q)
            shift[:, i] = step
            out[:, i] = (u(q + shift) - u(q - shift)) / (2.0 * step)
        return out

    def div(step):
        total = np.zeros(len(points))
        for i in range(n):
            shift = np.zeros_like(points)
            shift[:, i] = step
            g_plus = grad(points + shift, step)
            g_minus = grad(points - shift, step)
            f_plus = np.linalg.norm(g_plus, axis=1) ** (p - 2.0) * g_plus[:, i]
            f_minus = (
                np.linalg.norm(g_minus, axis=1) ** (p - 2.0) * g_minus[:, i]
            )
            total += (f_plus - f_minus) / (2.0 * step)
        return total

    value = (4.0 * div(0.5 * h) - div(h)) / 3.0
    return restore(value, single)


def flux_euler_defect(field: FluxField, x):
    """Relative defect |<F, g> - H^p(g)| / H^p(g) of the lifted Euler identity."""  # noqa: E501
    points, _ = as_points(x, field.norm.dimension)
    g = field.gradient(points)
    f = field.flux(points)
    hp = field.norm.value(g) ** field.p
    return np.abs(np.einsum("mi,mi->m", f, g) - hp) / hp


@dataclass(frozen=True)
class ManufacturedField:
    """
    A field u with -Δ_p^H u = f known in closed form.

    ``linear`` is u = <a, x> with f = 0; ``dual_quadratic`` is
    u = H0(x)^2/2 with f = -(N + p - 2) H0(x)^{p-2}, which follows from
    grad H(grad H0(x)) = x/H0(x).
    """

    name: str
    p: float
    norm: AnisotropyNorm
    value: Callable[[np.ndarray], np.ndarray]
    gradient: Callable[[np.ndarray], np.ndarray]
    source: Callable[[np.ndarray], np.ndarray]

    @property
    def field(self) -> FluxField:
        return FluxField(self.norm, self.p, self.gradient)

    @classmethod
    def linear(cls, norm: AnisotropyNorm, p: float, a) -> "ManufacturedField":
        a = np.asarray(a, dtype=float)
        if np.linalg.norm(a) <= FLUX_THRESHOLD:
            raise BadParameter("Linear field needs a nonzero slope", output={})

        def gradient(x):
            points = np.atleast_2d(x)
            return np.broadcast_to(a, points.shape).copy()

        return cls(
            name="linear",
            p=p,
            norm=norm,
            value=lambda x: np.atleast_2d(x) @ a,
            gradient=gradient,
            source=lambda x: np.zeros(len(np.atleast_2d(x))),
        )

    @classmethod
    def dual_quadratic(cls, gauge: DualGauge, p: float) -> "ManufacturedField":
        n = gauge.dimension

        def gradient(x):
            points = np.atleast_2d(x)
            h0 = np.atleast_1d(gauge.value(points))
            return h0[:, None] * np.atleast_2d(gauge.gradient(points))

        def source(x):
            h0 = np.atleast_1d(gauge.value(np.atleast_2d(x)))
            return -(n + p - 2.0) * h0 ** (p - 2.0)

        return cls(
            name="dual_quadratic",
            p=p,
            norm=gauge.base,
            value=lambda x: 0.5
            * np.atleast_1d(gauge.value(np.atleast_2d(x))) ** 2,
            gradient=gradient,
            source=source,
        )
