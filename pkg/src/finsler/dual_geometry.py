"""
Dual gauges H0, reversed duals Ĥ0(x) = H0(-x) and Wulff shapes
{Ĥ0(x - c) < r}.

H0(x) = sup over the unit sphere of <x, xi>/H(xi). The closed-form families
evaluate it directly; otherwise (tabulated gauges, or when forced) the
supremum is found numerically and the gradient follows the envelope rule
grad H0(x) = xi*/H(xi*) at the maximizer xi*.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from finsler._internal.sphere import (
    angles_to_sphere,
    angular_rule,
    circle_points,
    quasi_uniform_sphere,
    sphere_rule,
)
from finsler._internal.utils import (
    as_points,
    pairwise_sum,
    read_only,
    restore,
)
from finsler.anisotropy import (
    AnisotropyNorm,
    EllipseNorm,
    EuclideanNorm,
    PNorm,
    ShiftedNorm,
)
from finsler.types import (
    BadParameter,
    DualMode,
    MonteCarloEstimate,
    NoConvergence,
    OptimizerDiverged,
    QuadratureResult,
    ZeroVector,
)

ZERO_THRESHOLD = 1e-14
SCAN_ANGLES = 2048
GOLDEN_TOLERANCE = 1e-12
N_STARTS = 32
ASCENT_MAX_ITER = 5000
ASCENT_TOLERANCE = 1e-10
MAX_NEWTON_STEP = 0.5
ARMIJO = 1e-4
CHUNK = 1024
INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0

Integrand = Callable[[np.ndarray, np.ndarray], np.ndarray]

CLOSED_FORM_TYPES = (EuclideanNorm, EllipseNorm, PNorm, ShiftedNorm)


class DualGauge:
    """
    The dual H0 of an anisotropy H together with the reversed dual Ĥ0.

    Args:
        base (AnisotropyNorm): the gauge H.
        mode (DualMode, optional): defaults to ``CLOSED_FORM`` for the
            euclidean, ellipse, pnorm and shifted families and to
            ``OPTIMIZED`` for tabulated gauges. Forcing ``OPTIMIZED`` on a
            closed-form family is how the closed forms are cross-checked.

    Raises:
        BadParameter: if ``CLOSED_FORM`` is requested for a tabulated gauge.
    """

    def __init__(self, base: AnisotropyNorm, mode: Optional[DualMode] = None):
        closed = isinstance(base, CLOSED_FORM_TYPES)
        if mode is None:
            mode = DualMode.CLOSED_FORM if closed else DualMode.OPTIMIZED
        if mode is DualMode.CLOSED_FORM and not closed:
            raise BadParameter(
                f"No closed-form dual for {base.family.value} gauges",
                output=base.to_spec(),
            )
        self.base = base
        self.mode = mode
        self.dimension = base.dimension
        self._unit_volume: Optional[float] = None
        if self.dimension >= 3:
            starts = quasi_uniform_sphere(N_STARTS, self.dimension)
            self._starts = read_only(starts)
        else:
            scan = circle_points(SCAN_ANGLES)
            self._scan = read_only(scan)
            self._scan_weights = read_only(1.0 / base.value(scan))

    def value(self, x):
        """H0(x); zero at the origin by homogeneity."""
        points, single = as_points(x, self.dimension)
        out = np.zeros(len(points))
        nonzero = np.linalg.norm(points, axis=1) > ZERO_THRESHOLD
        if nonzero.any():
            out[nonzero] = self._value(points[nonzero])
        return restore(out, single)

    def reversed_value(self, x):
        """Ĥ0(x) = H0(-x)."""
        return self.value(-np.asarray(x, dtype=float))

    def gradient(self, x):
        points, single = as_points(x, self.dimension)
        if np.any(np.linalg.norm(points, axis=1) <= ZERO_THRESHOLD):
            raise ZeroVector(
                "Dual gradient evaluated at the zero vector", output={}
            )
        return restore(self._gradient(points), single)

    def reversed_gradient(self, x):
        """grad Ĥ0(x) = -grad H0(-x)."""
        return -self.gradient(-np.asarray(x, dtype=float))

    def maximizer(self, x):
        """Unit vector xi* attaining the supremum defining H0(x)."""
        points, single = as_points(x, self.dimension)
        _, xi = self._optimize(points)
        return restore(xi, single)

    def to_dict(self) -> dict:
        return {"base": self.base.to_spec(), "mode": self.mode.value}

    def _value(self, points):
        if self.mode is DualMode.OPTIMIZED:
            return self._optimize(points)[0]
        base = self.base
        if isinstance(base, EuclideanNorm):
            return np.linalg.norm(points, axis=1)
        if isinstance(base, EllipseNorm):
            quad = np.einsum("mi,ij,mj->m", points, base.inverse, points)
            return np.sqrt(quad)
        if isinstance(base, PNorm):
            return PNorm(self.dimension, base.conjugate)._value(points)
        return _shifted_dual(base, points)[0]

    def _gradient(self, points):
        if self.mode is DualMode.OPTIMIZED:
            _, xi = self._optimize(points)
            return xi / self.base.value(xi)[:, None]
        base = self.base
        if isinstance(base, EuclideanNorm):
            return points / np.linalg.norm(points, axis=1)[:, None]
        if isinstance(base, EllipseNorm):
            value = self._value(points)
            return (points @ base.inverse) / value[:, None]
        if isinstance(base, PNorm):
            return PNorm(self.dimension, base.conjugate)._gradient(points)
        return _shifted_dual(base, points)[1]

    def _optimize(self, points):
        values = np.empty(len(points))
        maximizers = np.empty_like(points)
        for start in range(0, len(points), CHUNK):
            chunk = points[start : start + CHUNK]
            if self.dimension == 2:
                v, xi = self._golden_search(chunk)
            else:
                v, xi = self._projected_ascent(chunk)
            values[start : start + CHUNK] = v
            maximizers[start : start + CHUNK] = xi
        bad = ~np.isfinite(values) | (values <= 0.0)
        if bad.any():
            index = int(np.argmax(bad))
            raise OptimizerDiverged(
                "Support-function optimization diverged",
                output={
                    "x": points[index].tolist(),
                    "best_value": float(values[index]),
                    "best_iterate": maximizers[index].tolist(),
                },
            )
        return values, maximizers

    def _objective(self, x, xi):
        return np.einsum("mi,mi->m", x, xi) / self.base.value(xi)

    def _golden_search(self, x):
        scores = (x @ self._scan.T) * self._scan_weights
        best = np.argmax(scores, axis=1)
        step = 2.0 * math.pi / SCAN_ANGLES
        lo = best * step - step
        hi = best * step + step

        def f(theta):
            return self._objective(
                x, np.column_stack([np.cos(theta), np.sin(theta)])
            )

        c = hi - INV_PHI * (hi - lo)
        d = lo + INV_PHI * (hi - lo)
        fc, fd = f(c), f(d)
        while np.max(hi - lo) > GOLDEN_TOLERANCE:
            left = fc > fd
            hi = np.where(left, d, hi)
            lo = np.where(left, lo, c)
            new_c = hi - INV_PHI * (hi - lo)
            new_d = lo + INV_PHI * (hi - lo)
            c, d = np.where(left, new_c, d), np.where(left, c, new_d)
            fc, fd = np.where(left, f(c), fd), np.where(left, fc, f(d))
        theta = 0.5 * (lo + hi)
        xi = np.column_stack([np.cos(theta), np.sin(theta)])
        return self._objective(x, xi), xi

    def _tangent_hessian(self, r, z, h, grad_h, f):
        # Hessian of <r, xi>/H(xi), restricted to the tangent space at z
        outer = grad_h[:, :, None] * grad_h[:, None, :]
        hess_h = (0.5 * self.base.hessian_H2(z) - outer) / h[:, None, None]
        cross = r[:, :, None] * grad_h[:, None, :]
        hess = (
            -(cross + cross.transpose(0, 2, 1)) / (h**2)[:, None, None]
            + 2.0 * (f / h**2)[:, None, None] * outer
            - (f / h)[:, None, None] * hess_h
        )
        eye = np.eye(z.shape[1])
        proj = eye - z[:, :, None] * z[:, None, :]
        return proj @ hess @ proj

    def _ascent_direction(self, r, z, h, grad_h, f, grad, scale):
        """Sphere Newton step where it ascends, else the scaled gradient."""
        fallback = grad / scale[:, None]
        hess = self._tangent_hessian(r, z, h, grad_h, f)
        # the normal block -zz^T keeps the system regular off the tangent
        system = hess - z[:, :, None] * z[:, None, :]
        try:
            newton = -np.linalg.solve(system, grad[:, :, None])[:, :, 0]
        except np.linalg.LinAlgError:
            return fallback
        length = np.linalg.norm(newton, axis=1)
        cap = MAX_NEWTON_STEP / np.maximum(length, 1e-300)
        newton *= np.minimum(1.0, cap)[:, None]
        slope = np.einsum("mi,mi->m", grad, newton)
        use = np.isfinite(slope) & (slope > 0.0)
        return np.where(use[:, None], newton, fallback)

    def _projected_ascent(self, x):
        m, n = x.shape
        rows = np.repeat(x, N_STARTS, axis=0)
        xi = np.tile(self._starts, (m, 1))
        f = self._objective(rows, xi)
        alpha = np.ones(len(rows))
        active = np.ones(len(rows), dtype=bool)
        for _ in range(ASCENT_MAX_ITER):
            if not active.any():
                break
            idx = np.flatnonzero(active)
            r, z, fz = rows[idx], xi[idx], f[idx]
            h = self.base.value(z)
            grad_h = self.base.gradient(z)
            # <x, xi>/H(xi) is 0-homogeneous, so its gradient is tangent
            grad = r / h[:, None] - (fz / h)[:, None] * grad_h
            grad -= np.einsum("mi,mi->m", grad, z)[:, None] * z
            gnorm = np.linalg.norm(grad, axis=1)
            scale = np.maximum(
                np.abs(fz), 1e-3 * np.linalg.norm(r, axis=1) / h
            )
            done = gnorm <= ASCENT_TOLERANCE * scale
            direction = self._ascent_direction(
                r, z, h, grad_h, fz, grad, scale
            )
            slope = np.einsum("mi,mi->m", grad, direction)
            trial = z + alpha[idx][:, None] * direction
            trial /= np.linalg.norm(trial, axis=1)[:, None]
            f_trial = self._objective(r, trial)
            accept = f_trial >= fz + ARMIJO * alpha[idx] * slope
            accept &= ~done
            xi[idx[accept]] = trial[accept]
            f[idx[accept]] = f_trial[accept]
            alpha[idx] = np.where(
                accept, np.minimum(2.0 * alpha[idx], 1.0), 0.5 * alpha[idx]
            )
            stalled = alpha[idx] < 1e-16
            active[idx[done | stalled]] = False
        else:
            logging.warning(
                f"Projected ascent hit {ASCENT_MAX_ITER} iterations on "
                f"{int(active.sum())} starts"
            )
        f = f.reshape(m, N_STARTS)
        best = np.argmax(f, axis=1)
        xi = xi.reshape(m, N_STARTS, n)[np.arange(m), best]
        return f[np.arange(m), best], xi


def _shifted_dual(base: ShiftedNorm, points):
    b = base.b
    beta = base.beta
    bx = points @ b
    s = np.sqrt(bx**2 + beta * np.einsum("mi,mi->m", points, points))
    value = (s - bx) / beta
    grad = ((bx[:, None] * b + beta * points) / s[:, None] - b) / beta
    return value, grad


def dual_value(gauge: DualGauge, x):
    """
    H0(x) = sup_{|xi|=1} <x, xi>/H(xi).

    Example:
        >>> dual_value(DualGauge(ShiftedNorm([0.5, 0.0])), [1.0, 0.0])
        0.6666666666666666
    """
    return gauge.value(x)


def reversed_dual(gauge: DualGauge, x):
    return gauge.reversed_value(x)


def grad_dual(gauge: DualGauge, x):
    return gauge.gradient(x)


@dataclass(frozen=True, eq=False)
class WulffShape:
    """The Wulff ball {x : Ĥ0(x - center) < radius}."""

    center: np.ndarray
    radius: float
    gauge: DualGauge

    def __post_init__(self):
        center = np.asarray(self.center, dtype=float).reshape(-1)
        if len(center) != self.gauge.dimension:
            raise BadParameter(
                "Wulff shape center has the wrong dimension",
                output={"center": center.tolist()},
            )
        if not self.radius > 0.0:
            raise BadParameter(
                "Wulff shape radius must be positive",
                output={"radius": self.radius},
            )
        object.__setattr__(self, "center", read_only(center))

    @property
    def dimension(self) -> int:
        return self.gauge.dimension

    def contains(self, x):
        points, single = as_points(x, self.dimension)
        inside = self.gauge.reversed_value(points - self.center) < self.radius
        return restore(inside, single)

    def volume(self) -> float:
        return self.radius**self.dimension * wulff_volume(self.gauge)

    def boundary_point(self, omega):
        """Radial map omega -> c + r·omega/Ĥ0(omega) onto the boundary."""
        directions, single = as_points(omega, self.dimension)
        scale = self.radius / self.gauge.reversed_value(directions)
        return restore(self.center + scale[:, None] * directions, single)

    def outer_normal(self, x):
        points, single = as_points(x, self.dimension)
        grad = self.gauge.reversed_gradient(points - self.center)
        normal = grad / np.linalg.norm(grad, axis=1)[:, None]
        return restore(normal, single)


def wulff_volume(gauge: DualGauge) -> float:
    """
    Lebesgue measure of B_1^{Ĥ0} by the polar formula (1/N)∫ Ĥ0(omega)^{-N} dsigma.

    2D uses 2^12 and 3D 64 x 128 double-exponential angles split at the
    coordinate planes, higher dimensions 2^20 quasi-Monte Carlo sphere
    points. The value is kept on the gauge after the first call.
    """  # noqa: E501
    if gauge._unit_volume is None:
        n = gauge.dimension
        resolution = {2: 2**12, 3: 64}.get(n, 2**20)
        nodes, weights = sphere_rule(n, resolution)
        values = weights * gauge.reversed_value(nodes) ** (-float(n))
        gauge._unit_volume = pairwise_sum(values) / n
    return gauge._unit_volume


def max_wulff_radius(gauge: DualGauge, samples: int = 4096) -> float:
    """Largest |x| on the unit Wulff sphere, from a quasi-uniform scan."""
    directions = quasi_uniform_sphere(samples, gauge.dimension)
    return float(np.max(1.0 / gauge.reversed_value(directions)))


def wulff_volume_monte_carlo(
    gauge: DualGauge, samples: int = 2**20, seed: int = 0
) -> MonteCarloEstimate:
    """Rejection sampling of B_1^{Ĥ0} in an enclosing box."""
    n = gauge.dimension
    half = 1.1 * max_wulff_radius(gauge)
    box = (2.0 * half) ** n
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    hits = []
    remaining = samples
    while remaining > 0:
        size = min(remaining, 2**18)
        x = rng.uniform(-half, half, size=(size, n))
        hits.append(np.count_nonzero(gauge.reversed_value(x) < 1.0))
        remaining -= size
    fraction = sum(hits) / samples
    return MonteCarloEstimate(
        value=box * fraction,
        std_error=box * math.sqrt(fraction * (1.0 - fraction) / samples),
        samples=samples,
        seed=seed,
    )


FD_STEP = 1e-4
# stencils reach 2 steps out and stay inside the piece
EDGE_FRACTION = 0.4


def _tangent(f, t, lower, upper, h=FD_STEP):
    """
    Fourth-order central derivative of a curve in t. Within 2.5h of a
    piece edge the step shrinks to 0.4 of the distance to that edge, so
    the rule is continuous in t and never samples across a kink.
    """
    edge = np.minimum(t - lower, upper - t)
    s = np.minimum(h, EDGE_FRACTION * edge)
    return (-f(t + 2 * s) + 8 * f(t + s) - 8 * f(t - s) + f(t - 2 * s)) / (
        12.0 * s[:, None]
    )


def _circle_rule(shape: WulffShape, integrand: Integrand, n: int):
    rule = angular_rule(2, n)

    def curve(t):
        return shape.boundary_point(angles_to_sphere(t[:, None]))

    theta = rule.angles[:, 0]
    points = curve(theta)
    tangent = _tangent(curve, theta, rule.lower[:, 0], rule.upper[:, 0])
    weights = rule.weights * np.linalg.norm(tangent, axis=1)
    normals = shape.outer_normal(points)
    values = np.asarray(integrand(points, normals), dtype=float)
    return (
        pairwise_sum(values * weights),
        pairwise_sum(np.abs(values) * weights),
        len(points),
    )


def _sphere_patch_rule(shape: WulffShape, integrand: Integrand, n_mu: int):
    rule = angular_rule(3, n_mu)
    theta, phi = rule.angles[:, 0], rule.angles[:, 1]

    def surface(t, p):
        return shape.boundary_point(angles_to_sphere(np.column_stack([t, p])))

    points = surface(theta, phi)
    d_theta = _tangent(
        lambda t: surface(t, phi), theta, rule.lower[:, 0], rule.upper[:, 0]
    )
    d_phi = _tangent(
        lambda p: surface(theta, p), phi, rule.lower[:, 1], rule.upper[:, 1]
    )
    weights = rule.weights * np.linalg.norm(
        np.cross(d_theta, d_phi), axis=1
    )
    normals = shape.outer_normal(points)
    values = np.asarray(integrand(points, normals), dtype=float)
    return (
        pairwise_sum(values * weights),
        pairwise_sum(np.abs(values) * weights),
        len(points),
    )


def boundary_quadrature(
    shape: WulffShape,
    integrand: Integrand,
    rtol: float = 1e-8,
    max_nodes: int = 2**20,
    strict: bool = False,
) -> QuadratureResult:
    """
    Integrate ``integrand(points, outer_normals)`` over the Wulff sphere.

    The boundary is parametrized by the radial map of the unit sphere and
    its surface element is taken from fourth-order finite-difference
    tangents (step 1e-4 in the angle variables, shorter next to piece
    edges). Angles are split at the coordinate planes, where p-norm gauges
    lose smoothness, and each piece uses a double-exponential rule.
    Resolution doubles until two successive estimates agree to ``rtol``
    relative to the integral of |integrand| or ``max_nodes`` is reached.

    Args:
        shape (WulffShape): a 2D or 3D Wulff ball.
        integrand (callable): maps (M, N) points and (M, N) unit outer
            normals to (M,) values.
        rtol (float): relative tolerance on successive refinements.
        max_nodes (int): node cap.
        strict (bool): raise instead of returning a non-converged result.

    Raises:
        BadParameter: for shapes outside 2D/3D.
        NoConvergence: when ``strict`` and the tolerance was not met.
    """
    if shape.dimension == 2:
        rule, level = _circle_rule, 64
    elif shape.dimension == 3:
        rule, level = _sphere_patch_rule, 16
    else:
        raise BadParameter(
            "Boundary quadrature supports 2D and 3D shapes only",
            output={"dimension": shape.dimension},
        )

    def nodes(lv):
        return lv if shape.dimension == 2 else 2 * lv * lv

    previous, _, evaluations = rule(shape, integrand, level)
    error = math.inf
    value = previous
    while nodes(2 * level) <= max_nodes:
        level *= 2
        value, magnitude, count = rule(shape, integrand, level)
        evaluations += count
        error = abs(value - previous)
        if error <= rtol * max(magnitude, 1e-300):
            return QuadratureResult(value, error, True, evaluations)
        previous = value
    result = QuadratureResult(value, error, False, evaluations)
    logging.warning(
        f"Boundary quadrature stopped at {evaluations} nodes with "
        f"error {error:.3e}"
    )
    if strict:
        raise NoConvergence(
            "Boundary quadrature did not converge", output=result.to_dict()
        )
    return result
