"""
The classified family of finite-mass solutions of -Δ_N^H u = e^u in R^N:

    u(x) = log(c_N λ^N) - N log(1 + λ^{N/(N-1)} Ĥ0(x - x0)^{N/(N-1)}),
    c_N = N (N^2/(N-1))^{N-1}.

Everything exponential is evaluated in the log domain.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from finsler._internal.utils import (
    as_points,
    read_only,
    restore,
    validate_dimension,
    validate_positive,
)
from finsler.dual_geometry import DualGauge, WulffShape, wulff_volume
from finsler.types import AboveMaximum, BadParameter


def log_normalization(dimension: int) -> float:
    """log c_N with c_N = N (N^2/(N-1))^{N-1}."""
    n = dimension
    return math.log(n) + (n - 1) * math.log(n * n / (n - 1))


def decay_rate(dimension: int) -> float:
    """N^2/(N-1), the quantized value of gamma0."""
    return dimension * dimension / (dimension - 1)


def quantized_mass_target(dimension: int, wulff_unit_volume: float) -> float:
    """
    Total mass N (N^2/(N-1))^{N-1} |B_1^{Ĥ0}| carried by every finite-mass solution.

    Example:
        >>> quantized_mass_target(2, math.pi) / math.pi
        8.0
    """  # noqa: E501
    validate_dimension(dimension)
    validate_positive("wulff_unit_volume", wulff_unit_volume)
    return math.exp(log_normalization(dimension)) * wulff_unit_volume


def gamma0(mass: float, wulff_unit_volume: float, dimension: int) -> float:
    validate_dimension(dimension)
    validate_positive("mass", mass)
    validate_positive("wulff_unit_volume", wulff_unit_volume)
    ratio = mass / (dimension * wulff_unit_volume)
    return ratio ** (1.0 / (dimension - 1))


def kappa_n(dimension: int, wulff_unit_volume: float) -> float:
    n = dimension
    return decay_rate(n) * (n * wulff_unit_volume) ** (1.0 / (n - 1))


def t0_from_lambda(dimension: int, lam: float) -> float:
    validate_positive("lambda", lam)
    return log_normalization(dimension) + dimension * math.log(lam)


def lambda_from_t0(dimension: int, t0: float) -> float:
    """Inverse of the peak value t0 = log(c_N λ^N)."""
    validate_dimension(dimension)
    return math.exp((t0 - log_normalization(dimension)) / dimension)


@dataclass(frozen=True, eq=False)
class LiouvilleSolution:
    dimension: int
    lam: float
    center: np.ndarray
    gauge: DualGauge
    wulff_unit_volume: float

    @classmethod
    def create(
        cls,
        gauge: DualGauge,
        lam: float = 1.0,
        center=None,
        wulff_unit_volume: Optional[float] = None,
    ) -> "LiouvilleSolution":
        """
        Build the solution with parameters (λ, x0) for the gauge's Ĥ0.

        Args:
            gauge (DualGauge): supplies Ĥ0.
            lam (float): λ > 0.
            center: x0, the origin by default.
            wulff_unit_volume (float, optional): |B_1^{Ĥ0}|; computed with
                :func:`wulff_volume` when omitted.

        Raises:
            BadParameter: on a non-positive λ or a center of wrong length.
        """
        validate_positive("lambda", lam)
        n = gauge.dimension
        if center is None:
            center = np.zeros(n)
        center = np.asarray(center, dtype=float).reshape(-1)
        if len(center) != n:
            raise BadParameter(
                f"Center must have {n} coordinates",
                output={"center": center.tolist()},
            )
        if wulff_unit_volume is None:
            wulff_unit_volume = wulff_volume(gauge)
        return cls(
            dimension=n,
            lam=float(lam),
            center=read_only(center),
            gauge=gauge,
            wulff_unit_volume=float(wulff_unit_volume),
        )

    @property
    def exponent(self) -> float:
        return self.dimension / (self.dimension - 1)

    @property
    def t0(self) -> float:
        return t0_from_lambda(self.dimension, self.lam)

    @property
    def mass(self) -> float:
        return quantized_mass_target(self.dimension, self.wulff_unit_volume)

    @property
    def gamma0(self) -> float:
        return gamma0(self.mass, self.wulff_unit_volume, self.dimension)

    @property
    def kappa(self) -> float:
        return kappa_n(self.dimension, self.wulff_unit_volume)

    def wulff_radius(self, x):
        """rho = Ĥ0(x - x0)."""
        points, single = as_points(x, self.dimension)
        return restore(self.gauge.reversed_value(points - self.center), single)

    def profile(self, rho):
        """u as a function of rho = Ĥ0(x - x0)."""
        rho = np.asarray(rho, dtype=float)
        a = self.exponent
        with np.errstate(divide="ignore"):
            log_rho = np.log(rho)
        tail = np.logaddexp(0.0, a * (math.log(self.lam) + log_rho))
        return self.t0 - self.dimension * tail

    def gradient_magnitude(self, rho):
        """H(grad u) on the Wulff sphere of radius rho."""
        rho = np.asarray(rho, dtype=float)
        a = self.exponent
        n = self.dimension
        return (
            decay_rate(n)
            * rho ** (1.0 / (n - 1))
            / (self.lam ** (-a) + rho**a)
        )

    def value(self, x):
        return self.profile(self.wulff_radius(x))

    def gradient(self, x):
        points, single = as_points(x, self.dimension)
        y = points - self.center
        rho = self.gauge.reversed_value(y)
        out = np.zeros_like(points)
        away = rho > 0.0
        if away.any():
            grad = self.gauge.reversed_gradient(y[away])
            out[away] = -self.gradient_magnitude(rho[away])[:, None] * grad
        return restore(out, single)

    def level_radius(self, t: float) -> float:
        """
        Radius R(t) of the superlevel set {u > t} = B_{R(t)}^{Ĥ0}(x0).

        Raises:
            AboveMaximum: if t > t0.
        """
        gap = self._gap(t)
        a = self.exponent
        return (math.expm1(gap / self.dimension) / self.lam**a) ** (1.0 / a)

    def level_mass(self, t: float) -> float:
        """M(t) = ∫_{u>t} e^u = [κ_N (1 - e^{(t-t0)/N})]^{N-1}."""
        gap = self._gap(t)
        n = self.dimension
        return (self.kappa * -math.expm1(-gap / n)) ** (n - 1)

    def level_volume(self, t: float) -> float:
        return self.level_radius(t) ** self.dimension * self.wulff_unit_volume

    def level_gradient_norm(self, t: float) -> float:
        """The constant value of H(grad u) on {u = t}."""
        return float(self.gradient_magnitude(self.level_radius(t)))

    def level_set(self, t: float) -> WulffShape:
        return WulffShape(self.center, self.level_radius(t), self.gauge)

    def asymptotic_constant(self) -> float:
        """Limit of u + gamma0·log Ĥ0 at infinity: log(c_N λ^N λ^{-N^2/(N-1)})."""  # noqa: E501
        n = self.dimension
        return self.t0 - decay_rate(n) * math.log(self.lam)

    def to_dict(self) -> dict:
        return {
            "N": self.dimension,
            "lambda": self.lam,
            "center": self.center.tolist(),
            "t0": self.t0,
            "wulff_unit_volume": self.wulff_unit_volume,
        }

    def _gap(self, t: float) -> float:
        gap = self.t0 - t
        if gap < 0.0:
            raise AboveMaximum(
                f"Level {t} lies above the maximum t0={self.t0}",
                output={"t": t, "t0": self.t0},
            )
        return gap


def u_value(sol: LiouvilleSolution, x):
    """u(x), evaluated in the log domain."""
    return sol.value(x)


def u_gradient(sol: LiouvilleSolution, x):
    """grad u(x); the zero vector at x0."""
    return sol.gradient(x)


def level_radius(sol: LiouvilleSolution, t: float) -> float:
    return sol.level_radius(t)


def level_mass(sol: LiouvilleSolution, t: float) -> float:
    return sol.level_mass(t)
