import math

import numpy as np
import pytest

from finsler._internal.utils import central_gradient
from finsler.solution import (
    LiouvilleSolution,
    decay_rate,
    gamma0,
    kappa_n,
    lambda_from_t0,
    level_mass,
    level_radius,
    log_normalization,
    quantized_mass_target,
    t0_from_lambda,
    u_gradient,
    u_value,
)
from finsler.types import AboveMaximum, BadParameter


class TestConstants:
    def test_normalization(self):
        assert math.exp(log_normalization(2)) == pytest.approx(8.0)
        assert math.exp(log_normalization(3)) == pytest.approx(60.75)

    def test_decay_rate(self):
        assert decay_rate(2) == 4.0
        assert decay_rate(3) == 4.5

    def test_quantized_mass(self):
        assert quantized_mass_target(2, math.pi) == pytest.approx(8 * math.pi)
        assert quantized_mass_target(3, 4 * math.pi / 3) == pytest.approx(
            81 * math.pi
        )

    def test_quantized_mass_rejects_bad_volume(self):
        with pytest.raises(BadParameter):
            quantized_mass_target(2, 0.0)

    def test_gamma0_of_the_quantized_mass(self):
        for n, volume in [(2, math.pi), (3, 4.2), (5, 1.3)]:
            mass = quantized_mass_target(n, volume)
            assert gamma0(mass, volume, n) == pytest.approx(decay_rate(n))

    def test_kappa(self):
        assert kappa_n(2, math.pi) == pytest.approx(8 * math.pi)

    @pytest.mark.parametrize("n", [2, 3, 4, 6])
    def test_lambda_t0_round_trip(self, n):
        for lam in (1e-3, 0.5, 1.0, 37.0):
            t0 = t0_from_lambda(n, lam)
            assert lambda_from_t0(n, t0) == pytest.approx(lam, rel=1e-12)


class TestLiouvilleSolution:
    def test_classical_profile(self, solution):
        assert solution.t0 == pytest.approx(math.log(8.0))
        assert u_value(solution, [0.0, 0.0]) == pytest.approx(math.log(8.0))
        assert u_value(solution, [1.0, 0.0]) == pytest.approx(math.log(2.0))
        x = np.array([[0.3, -2.0], [10.0, 4.0]])
        expected = math.log(8.0) - 2.0 * np.log1p(np.sum(x * x, axis=1))
        np.testing.assert_allclose(solution.value(x), expected, rtol=1e-14)

    def test_mass_and_decay(self, solution):
        assert solution.mass == pytest.approx(8 * math.pi)
        assert solution.gamma0 == pytest.approx(4.0)
        assert solution.asymptotic_constant() == pytest.approx(math.log(8))

    def test_far_field_has_no_overflow(self, shifted_solution):
        value = u_value(shifted_solution, [1e200, 0.0])
        assert np.isfinite(value)
        assert value < -1000.0

    def test_gradient_vanishes_at_center(self, shifted_solution):
        np.testing.assert_array_equal(
            u_gradient(shifted_solution, [0.2, -0.1]), [0.0, 0.0]
        )

    def test_gradient_matches_finite_differences(self, shifted_solution):
        x = np.array([[1.0, 0.5], [-2.0, 0.3], [0.4, 3.0]])
        fd = central_gradient(shifted_solution.value, x, 1e-6)
        np.testing.assert_allclose(
            shifted_solution.gradient(x), fd, rtol=1e-7, atol=1e-9
        )

    def test_gradient_magnitude_is_h_of_gradient(self, shifted_solution):
        x = np.array([[1.0, 0.5], [-2.0, 0.3]])
        rho = shifted_solution.wulff_radius(x)
        h = shifted_solution.gauge.base.value(shifted_solution.gradient(x))
        np.testing.assert_allclose(
            h, shifted_solution.gradient_magnitude(rho), rtol=1e-12
        )

    def test_lambda_scaling(self, euclidean_gauge):
        one = LiouvilleSolution.create(euclidean_gauge, 1.0)
        three = LiouvilleSolution.create(euclidean_gauge, 3.0)
        x = np.array([0.4, -0.2])
        assert three.value(x) == pytest.approx(
            one.value(3.0 * x) + 2.0 * math.log(3.0)
        )

    def test_rejects_bad_lambda(self, euclidean_gauge):
        with pytest.raises(BadParameter):
            LiouvilleSolution.create(euclidean_gauge, 0.0)

    def test_rejects_bad_center(self, euclidean_gauge):
        with pytest.raises(BadParameter):
            LiouvilleSolution.create(euclidean_gauge, 1.0, [0.0, 0.0, 0.0])

    def test_to_dict(self, solution):
        data = solution.to_dict()
        assert data["N"] == 2
        assert data["center"] == [0.0, 0.0]
        assert data["wulff_unit_volume"] == pytest.approx(math.pi)


class TestLevelSets:
    def test_level_radius_closes_the_loop(self, shifted_solution):
        sol = shifted_solution
        for gap in (1e-6, 0.1, 1.0, 30.0):
            t = sol.t0 - gap
            radius = level_radius(sol, t)
            assert float(sol.profile(radius)) == pytest.approx(t, rel=1e-12)

    def test_level_radius_at_peak(self, solution):
        assert level_radius(solution, solution.t0) == 0.0

    def test_classical_level_mass(self, solution):
        # ∫_{|x|<R} 8/(1+|x|^2)^2 = 8π R^2/(1+R^2)
        radius = 1.7
        t = float(solution.profile(radius))
        expected = 8 * math.pi * radius**2 / (1 + radius**2)
        assert level_mass(solution, t) == pytest.approx(expected, rel=1e-12)

    def test_level_mass_tends_to_total_mass(self, shifted_solution):
        sol = shifted_solution
        assert sol.level_mass(sol.t0 - 200.0) == pytest.approx(
            sol.mass, rel=1e-12
        )

    def test_above_maximum(self, solution):
        with pytest.raises(AboveMaximum) as exc_info:
            solution.level_mass(solution.t0 + 0.1)
        assert exc_info.value.output["t0"] == pytest.approx(solution.t0)
        with pytest.raises(AboveMaximum):
            solution.level_radius(solution.t0 + 1e-9)

    def test_level_set_is_a_wulff_ball(self, shifted_solution):
        sol = shifted_solution
        shape = sol.level_set(sol.t0 - 1.0)
        np.testing.assert_array_equal(shape.center, sol.center)
        assert shape.radius == pytest.approx(sol.level_radius(sol.t0 - 1.0))
        assert sol.level_volume(sol.t0 - 1.0) == pytest.approx(
            shape.volume()
        )

    def test_level_gradient_norm(self, solution):
        radius = 2.0
        t = float(solution.profile(radius))
        assert solution.level_gradient_norm(t) == pytest.approx(
            4 * radius / (1 + radius**2)
        )
