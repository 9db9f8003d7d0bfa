import math

import numpy as np
import pytest

from finsler._internal.sphere import (
    angles_to_sphere,
    angular_rule,
    ball_volume,
    double_exponential,
    quasi_uniform_sphere,
    random_sphere,
    sphere_area,
    sphere_rule,
)


class TestSphere:
    def test_areas(self):
        assert sphere_area(2) == pytest.approx(2 * math.pi)
        assert sphere_area(3) == pytest.approx(4 * math.pi)
        assert ball_volume(4) == pytest.approx(math.pi**2 / 2)

    @pytest.mark.parametrize("dimension", [2, 3, 5])
    def test_quasi_uniform_points_are_unit_vectors(self, dimension):
        points = quasi_uniform_sphere(40, dimension)
        assert points.shape == (40, dimension)
        np.testing.assert_allclose(np.linalg.norm(points, axis=1), 1.0)

    def test_2d_directions_avoid_the_axes(self):
        points = quasi_uniform_sphere(8, 2)
        assert np.min(np.abs(points)) > 0.1

    def test_random_sphere(self, rng):
        points = random_sphere(100, 3, rng)
        np.testing.assert_allclose(np.linalg.norm(points, axis=1), 1.0)

    @pytest.mark.parametrize(
        "dimension, resolution", [(2, 256), (3, 64), (4, 4096)]
    )
    def test_rule_weights_sum_to_the_area(self, dimension, resolution):
        nodes, weights = sphere_rule(dimension, resolution)
        assert len(nodes) == len(weights)
        assert np.sum(weights) == pytest.approx(sphere_area(dimension))

    def test_3d_rule_integrates_polynomials(self):
        nodes, weights = sphere_rule(3, 96)
        # ∫_{S^2} z^2 = 4π/3
        assert np.sum(weights * nodes[:, 2] ** 2) == pytest.approx(
            4 * math.pi / 3, rel=1e-10
        )


class TestAngularRule:
    def test_endpoint_singularities_converge(self):
        nodes, weights = double_exponential(32, 0.0, 1.0)
        assert np.all((nodes > 0.0) & (nodes < 1.0))
        assert np.sum(weights * np.sqrt(nodes)) == pytest.approx(
            2.0 / 3.0, rel=1e-9
        )

    def test_nodes_near_an_edge_keep_their_distance(self):
        nodes, _ = double_exponential(32, 1.0, 2.0)
        assert nodes[-1] < 2.0
        assert 2.0 - nodes[-1] < 1e-10

    def test_kinks_on_the_axes_are_integrated_exactly(self):
        rule = angular_rule(2, 256)
        theta = rule.angles[:, 0]
        # ∫ |cos θ| dθ over the circle
        assert np.sum(rule.weights * np.abs(np.cos(theta))) == pytest.approx(
            4.0, rel=1e-12
        )

    def test_nodes_lie_inside_their_piece(self):
        rule = angular_rule(3, 16)
        assert rule.angles.shape == (2 * 16 * 16, 2)
        assert np.all(rule.angles > rule.lower)
        assert np.all(rule.angles < rule.upper)
        np.testing.assert_allclose(
            np.unique(rule.lower[:, 1]), 0.5 * math.pi * np.arange(4)
        )

    def test_3d_points_are_unit_vectors(self):
        rule = angular_rule(3, 8)
        points = angles_to_sphere(rule.angles)
        np.testing.assert_allclose(np.linalg.norm(points, axis=1), 1.0)

    @pytest.mark.parametrize("dimension, resolution", [(2, 6), (3, 5), (4, 8)])
    def test_unsupported_resolutions(self, dimension, resolution):
        with pytest.raises(ValueError, match="No angular rule"):
            angular_rule(dimension, resolution)
