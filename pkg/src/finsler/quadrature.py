"""
Integration primitives: adaptive Gauss-Kronrod on intervals and on [0, inf),
importance-sampled Monte Carlo for the total mass, and Wulff-polar
quadrature over Wulff balls.
"""

import heapq
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Optional, Tuple

import numpy as np

from finsler._internal.sphere import ball_volume, random_sphere, sphere_rule
from finsler._internal.utils import pairwise_sum
from finsler.config import FL_THREADS, QuadratureConfig
from finsler.dual_geometry import WulffShape, max_wulff_radius
from finsler.solution import LiouvilleSolution
from finsler.types import (
    BadParameter,
    MonteCarloEstimate,
    QuadratureResult,
    ToleranceNotMet,
)

# 15-point Kronrod nodes on [0, 1] (symmetric half) and the embedded
# 7-point Gauss weights, as tabulated in QUADPACK's qk15.
XGK = np.array(
    [
        0.991455371120812639206854697526329,
        0.949107912342758524526189684047851,
        0.864864423359769072789712788640926,
        0.741531185599394439863864773280788,
        0.586087235467691130294144845693013,
        0.405845151377397166906606412076961,
        0.207784955007898467600689403773245,
        0.000000000000000000000000000000000,
    ]
)
WGK = np.array(
    [
        0.022935322010529224963732008058970,
        0.063092092629978553290700663189204,
        0.104790010322250183839876322541518,
        0.140653259715525918745189590510238,
        0.169004726639267902826583426598550,
        0.190350578064785409913256402421014,
        0.204432940075298892414161999234649,
        0.209482141084727828012999174891714,
    ]
)
WG = np.array(
    [
        0.129484966168869693270611432679082,
        0.279705391489276667901467771423780,
        0.381830050505118944950369775488975,
        0.417959183673469387755102040816327,
    ]
)
NODES = np.concatenate([-XGK[:-1], XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([WGK[:-1], WGK[::-1]])
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[1:7:2] = WG[:3]
GAUSS_WEIGHTS[7] = WG[3]
GAUSS_WEIGHTS[9:14:2] = WG[2::-1]
EPS = np.finfo(float).eps
UFLOW = np.finfo(float).tiny

PARTITION = 2**18
ANGULAR_CAP = {2: 2**15, 3: 256}
ANGULAR_START = {2: 64, 3: 16}


def gauss_kronrod(
    f: Callable[[np.ndarray], np.ndarray], a: float, b: float
) -> Tuple[float, float]:
    """One 15-point Kronrod panel with the QUADPACK error estimate."""
    center = 0.5 * (a + b)
    half = 0.5 * (b - a)
    values = np.asarray(f(center + half * NODES), dtype=float)
    kronrod = half * float(KRONROD_WEIGHTS @ values)
    gauss = half * float(GAUSS_WEIGHTS @ values)
    mean = 0.5 * kronrod / half if half else 0.0
    resabs = abs(half) * float(KRONROD_WEIGHTS @ np.abs(values))
    resasc = abs(half) * float(KRONROD_WEIGHTS @ np.abs(values - mean))
    error = abs(kronrod - gauss)
    if resasc != 0.0 and error != 0.0:
        error = resasc * min(1.0, (200.0 * error / resasc) ** 1.5)
    if resabs > UFLOW / (50.0 * EPS):
        error = max(50.0 * EPS * resabs, error)
    return kronrod, error


def adaptive_interval(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    rtol: float = 1e-9,
    max_subdivisions: int = 2**15,
    atol: float = 0.0,
) -> QuadratureResult:
    """
    Globally adaptive Gauss-Kronrod quadrature of a vectorized integrand.

    The panel with the largest error estimate is bisected until the summed
    estimate drops below ``max(atol, rtol·|value|)`` or the number of
    panels reaches ``max_subdivisions``.
    """
    value, error = gauss_kronrod(f, a, b)
    heap = [(-error, a, b, value)]
    evaluations = 15
    total_value, total_error = value, error
    while total_error > max(atol, rtol * abs(total_value)):
        if len(heap) >= max_subdivisions:
            return QuadratureResult(
                total_value, total_error, False, evaluations
            )
        neg_error, lo, hi, panel = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        left, left_err = gauss_kronrod(f, lo, mid)
        right, right_err = gauss_kronrod(f, mid, hi)
        evaluations += 30
        heapq.heappush(heap, (-left_err, lo, mid, left))
        heapq.heappush(heap, (-right_err, mid, hi, right))
        total_value += left + right - panel
        total_error = max(total_error + left_err + right_err + neg_error, 0.0)
    panels = sorted(heap, key=lambda item: item[1])
    total_value = pairwise_sum([item[3] for item in panels])
    total_error = pairwise_sum([-item[0] for item in panels])
    return QuadratureResult(total_value, total_error, True, evaluations)


def _require(result: QuadratureResult, what: str, strict: bool):
    if result.converged:
        return result
    logging.warning(
        f"{what} stopped with error estimate {result.error:.3e} "
        f"on value {result.value:.12g}"
    )
    if strict:
        raise ToleranceNotMet(
            f"{what} did not reach the requested tolerance",
            output=result.to_dict(),
        )
    return result


def radial_improper(
    integrand: Callable[[np.ndarray], np.ndarray],
    cfg: Optional[QuadratureConfig] = None,
    scale: float = 1.0,
    strict: bool = True,
) -> QuadratureResult:
    """
    ∫_0^inf integrand(rho) d rho through rho = scale·s/(1 - s), s in [0, 1).

    Args:
        integrand (callable): vectorized, continuous and integrable on
            (0, inf).
        cfg (QuadratureConfig, optional): tolerance and subdivision cap.
        scale (float): the rho that maps to s = 1/2; choose it near the
            integrand's bulk.
        strict (bool): raise instead of returning a non-converged result.

    Raises:
        ToleranceNotMet: if ``strict`` and the tolerance was not reached;
            ``output`` holds the best value and its error estimate.

    Example:
        >>> radial_improper(lambda r: np.exp(-r)).value
        1.0
    """
    cfg = cfg or QuadratureConfig()

    def transformed(s):
        one_minus = 1.0 - s
        rho = scale * s / one_minus
        return integrand(rho) * scale / one_minus**2

    result = adaptive_interval(
        transformed,
        0.0,
        1.0,
        rtol=cfg.relative_tolerance,
        max_subdivisions=cfg.max_subdivisions,
    )
    return _require(result, "Radial quadrature", strict)


def mass_radial_integral(
    sol: LiouvilleSolution, cfg: Optional[QuadratureConfig] = None
) -> QuadratureResult:
    """∫_0^inf e^{u(rho)} rho^{N-1} d rho; the mass is N·|B_1^{Ĥ0}| times this."""  # noqa: E501
    n = sol.dimension

    def kernel(rho):
        return np.exp(sol.profile(rho) + (n - 1) * np.log(rho))

    return radial_improper(kernel, cfg, scale=1.0 / sol.lam)


def _mass_partition(
    sol: LiouvilleSolution,
    seed: np.random.SeedSequence,
    size: int,
    radius: Optional[float],
) -> Tuple[float, float]:
    rng = np.random.Generator(np.random.Philox(seed))
    n = sol.dimension
    directions = random_sphere(size, n, rng)
    u = 1.0 - rng.random(size)
    if radius is None:
        # Lomax volume law with tail |x|^{-N^2/(N-1)}
        alpha = 1.0 / (n - 1)
        w = u ** (-(n - 1.0)) - 1.0
        s = (sol.wulff_unit_volume / ball_volume(n)) ** (1.0 / n) / sol.lam
        r = s * w ** (1.0 / n)
        log_q = (
            math.log(alpha)
            - (alpha + 1.0) * np.log1p(w)
            - math.log(ball_volume(n) * s**n)
        )
        x = sol.center + r[:, None] * directions
        weights = np.exp(sol.value(x) - log_q)
    else:
        outer = 1.1 * radius * max_wulff_radius(sol.gauge)
        r = outer * u ** (1.0 / n)
        x = sol.center + r[:, None] * directions
        inside = sol.wulff_radius(x) < radius
        weights = np.where(inside, np.exp(sol.value(x)), 0.0)
        weights *= ball_volume(n) * outer**n
    return pairwise_sum(weights), pairwise_sum(weights * weights)


def monte_carlo_mass(
    sol: LiouvilleSolution,
    cfg: Optional[QuadratureConfig] = None,
    radius: Optional[float] = None,
    workers: Optional[int] = None,
) -> MonteCarloEstimate:
    """
    Monte Carlo estimate of ∫ e^u over R^N, or over B_radius^{Ĥ0}(x0).

    Over R^N the samples come from a heavy-tailed radial proposal decaying
    like |x|^{-N^2/(N-1)}, the tail of e^u itself. With ``radius`` the
    proposal is uniform on a euclidean ball enclosing the Wulff ball.
    Samples are split into partitions of 2^18 with independent Philox
    streams spawned from ``cfg.seed``; partition sums are reduced in a fixed
    order, so the estimate is bit-stable for a given seed and sample count.

    Raises:
        BadParameter: for N outside [2, 6].
    """
    cfg = cfg or QuadratureConfig()
    if not 2 <= sol.dimension <= 6:
        raise BadParameter(
            "Monte Carlo mass supports 2 <= N <= 6",
            output={"N": sol.dimension},
        )
    total = cfg.mc_samples
    sizes = [PARTITION] * (total // PARTITION)
    if total % PARTITION:
        sizes.append(total % PARTITION)
    seeds = np.random.SeedSequence(cfg.seed).spawn(len(sizes))
    workers = max(1, min(workers or FL_THREADS, len(sizes)))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(
            pool.map(
                lambda args: _mass_partition(sol, args[0], args[1], radius),
                zip(seeds, sizes),
            )
        )
    first = pairwise_sum([part[0] for part in parts])
    second = pairwise_sum([part[1] for part in parts])
    mean = first / total
    variance = max(second / total - mean * mean, 0.0) * total / (total - 1)
    return MonteCarloEstimate(
        value=mean,
        std_error=math.sqrt(variance / total),
        samples=total,
        seed=cfg.seed,
    )


def _interior_at(
    shape: WulffShape,
    integrand: Callable[[np.ndarray], np.ndarray],
    resolution: int,
    inner_radius: float,
    cfg: QuadratureConfig,
) -> QuadratureResult:
    n = shape.dimension
    nodes, weights = sphere_rule(n, resolution)
    inverse = 1.0 / shape.gauge.reversed_value(nodes)
    directions = nodes * inverse[:, None]
    angular = weights * inverse**n

    def radial(rho):
        rho = np.asarray(rho, dtype=float)
        points = (
            shape.center
            + rho[:, None, None] * directions[None, :, :]
        ).reshape(-1, n)
        values = np.asarray(integrand(points), dtype=float).reshape(
            len(rho), -1
        )
        return (values @ angular) * rho ** (n - 1)

    return adaptive_interval(
        radial,
        inner_radius,
        shape.radius,
        rtol=cfg.relative_tolerance,
        max_subdivisions=cfg.max_subdivisions,
    )


def wulff_interior(
    shape: WulffShape,
    integrand: Callable[[np.ndarray], np.ndarray],
    cfg: Optional[QuadratureConfig] = None,
    inner_radius: float = 0.0,
    strict: bool = True,
) -> QuadratureResult:
    """
    ∫ integrand over the Wulff ball (or the annulus inner_radius < Ĥ0 < r).

    Wulff-polar coordinates x = c + rho·omega/Ĥ0(omega) give
    dx = rho^{N-1} Ĥ0(omega)^{-N} d rho d sigma(omega). The radial integral is
    adaptive Gauss-Kronrod applied to the angular sum; the angular
    resolution doubles until two successive totals agree to the configured
    relative tolerance.

    Raises:
        BadParameter: for shapes outside 2D/3D or a bad inner radius.
        ToleranceNotMet: if ``strict`` and the tolerance was not reached.
    """
    cfg = cfg or QuadratureConfig()
    n = shape.dimension
    if n not in ANGULAR_START:
        raise BadParameter(
            "Wulff interior quadrature supports 2D and 3D shapes only",
            output={"dimension": n},
        )
    if not 0.0 <= inner_radius < shape.radius:
        raise BadParameter(
            "Inner radius must lie in [0, radius)",
            output={"inner_radius": inner_radius, "radius": shape.radius},
        )
    resolution = ANGULAR_START[n]
    previous = _interior_at(shape, integrand, resolution, inner_radius, cfg)
    evaluations = previous.evaluations
    while 2 * resolution <= ANGULAR_CAP[n]:
        resolution *= 2
        current = _interior_at(
            shape, integrand, resolution, inner_radius, cfg
        )
        evaluations += current.evaluations
        angular_error = abs(current.value - previous.value)
        error = angular_error + current.error
        tolerance = cfg.relative_tolerance * abs(current.value)
        if angular_error <= tolerance and current.converged:
            return QuadratureResult(current.value, error, True, evaluations)
        previous = current
    result = QuadratureResult(previous.value, error, False, evaluations)
    return _require(result, "Wulff interior quadrature", strict)
