import math
from typing import NamedTuple, Tuple

import numpy as np
from scipy.special import expit, gamma
from scipy.stats import norm, qmc

GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))


def sphere_area(dimension: int) -> float:
    """Surface measure of the unit sphere S^{N-1} in R^N."""
    return 2.0 * math.pi ** (dimension / 2.0) / gamma(dimension / 2.0)


def ball_volume(dimension: int) -> float:
    return sphere_area(dimension) / dimension


def circle_points(n: int, offset: float = 0.0) -> np.ndarray:
    angles = offset + 2.0 * math.pi * np.arange(n) / n
    return np.column_stack([np.cos(angles), np.sin(angles)])


def fibonacci_sphere(n: int) -> np.ndarray:
    k = np.arange(n) + 0.5
    z = 1.0 - 2.0 * k / n
    r = np.sqrt(np.maximum(1.0 - z * z, 0.0))
    phi = GOLDEN_ANGLE * k
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def sobol_sphere(n: int, dimension: int, seed: int = 0) -> np.ndarray:
    """Scrambled Sobol points pushed through the normal quantile and projected onto the sphere."""  # noqa: E501
    sampler = qmc.Sobol(d=dimension, scramble=True, seed=seed)
    m = max(1, math.ceil(math.log2(max(n, 2))))
    u = sampler.random_base2(m=m)[:n]
    u = np.clip(u, 1e-12, 1.0 - 1e-12)
    g = norm.ppf(u)
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def quasi_uniform_sphere(n: int, dimension: int) -> np.ndarray:
    """
    Deterministic, well-spread unit vectors.

    2D angles sit half a step off the coordinate axes; 3D uses a Fibonacci
    lattice and higher dimensions scrambled Sobol points.
    """
    if dimension == 2:
        return circle_points(n, offset=math.pi / n)
    if dimension == 3:
        return fibonacci_sphere(n)
    return sobol_sphere(n, dimension)


def random_sphere(
    n: int, dimension: int, rng: np.random.Generator
) -> np.ndarray:
    g = rng.standard_normal((n, dimension))
    return g / np.linalg.norm(g, axis=1, keepdims=True)



# truncation of the double-exponential variable; the tail is below 1e-13
DE_LIMIT = 3.0
QUADRANTS = 0.5 * math.pi * np.arange(5)
HEMISPHERES = np.array([0.0, 0.5 * math.pi, math.pi])


class AngularRule(NamedTuple):
    """
    Product rule in polar angles, split at the coordinate planes.

    ``angles`` has one column per angle (theta in 2D; theta, phi in 3D),
    ``weights`` are parameter-space weights (no sin(theta) factor) and
    ``lower``/``upper`` give the edges of the piece each node lies in.
    """

    angles: np.ndarray
    weights: np.ndarray
    lower: np.ndarray
    upper: np.ndarray


def double_exponential(
    count: int, lo: float, hi: float
) -> Tuple[np.ndarray, np.ndarray]:
    """
    tanh-sinh nodes and weights on [lo, hi] with ``count`` midpoints in the
    transformed variable. Endpoint singularities of algebraic type do not
    slow the convergence, so kinks of the integrand belong at piece edges.
    """
    step = 2.0 * DE_LIMIT / count
    t = -DE_LIMIT + (np.arange(count) + 0.5) * step
    u = 0.5 * math.pi * np.sinh(t)
    half = 0.5 * (hi - lo)
    # distances to the nearer edge without cancellation
    nodes = np.where(
        t < 0.0,
        lo + 2.0 * half * expit(2.0 * u),
        hi - 2.0 * half * expit(-2.0 * u),
    )
    weights = half * step * 0.5 * math.pi * np.cosh(t) / np.cosh(u) ** 2
    return nodes, weights


def _pieces(count: int, edges: np.ndarray):
    nodes, weights, lower, upper = [], [], [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        x, w = double_exponential(count, lo, hi)
        nodes.append(x)
        weights.append(w)
        lower.append(np.full(count, lo))
        upper.append(np.full(count, hi))
    parts = (nodes, weights, lower, upper)
    return tuple(np.concatenate(part) for part in parts)


def angular_rule(dimension: int, resolution: int) -> AngularRule:
    """
    ``resolution`` nodes on the circle (a multiple of 4) or
    ``resolution`` x ``2·resolution`` nodes in (theta, phi) on S^2
    (``resolution`` even).
    """
    if dimension == 2 and resolution % 4 == 0:
        theta, w, lo, hi = _pieces(resolution // 4, QUADRANTS)
        return AngularRule(theta[:, None], w, lo[:, None], hi[:, None])
    if dimension == 3 and resolution % 2 == 0:
        theta, w_t, lo_t, hi_t = _pieces(resolution // 2, HEMISPHERES)
        phi, w_p, lo_p, hi_p = _pieces(resolution // 2, QUADRANTS)

        def grid(a, b):
            a, b = np.meshgrid(a, b, indexing="ij")
            return np.column_stack([a.reshape(-1), b.reshape(-1)])

        return AngularRule(
            grid(theta, phi),
            np.outer(w_t, w_p).reshape(-1),
            grid(lo_t, lo_p),
            grid(hi_t, hi_p),
        )
    raise ValueError(
        f"No angular rule for dimension {dimension} at resolution "
        f"{resolution}"
    )


def angles_to_sphere(angles: np.ndarray) -> np.ndarray:
    if angles.shape[1] == 1:
        theta = angles[:, 0]
        return np.column_stack([np.cos(theta), np.sin(theta)])
    theta, phi = angles[:, 0], angles[:, 1]
    s = np.sin(theta)
    return np.column_stack([s * np.cos(phi), s * np.sin(phi), np.cos(theta)])


def sphere_rule(
    dimension: int, resolution: int
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Nodes and weights approximating integrals over S^{N-1}.

    2D and 3D use the ``angular_rule`` split at the coordinate planes, so
    gauges that are only finitely smooth across those planes (p-norms)
    keep fast convergence; higher dimensions equal-weight Sobol points
    (``resolution`` of them).
    """
    if dimension in (2, 3):
        rule = angular_rule(dimension, resolution)
        weights = rule.weights
        if dimension == 3:
            weights = weights * np.sin(rule.angles[:, 0])
        return angles_to_sphere(rule.angles), weights
    nodes = sobol_sphere(resolution, dimension)
    weights = np.full(len(nodes), sphere_area(dimension) / len(nodes))
    return nodes, weights
