import math

import numpy as np
import pytest

from finsler.operator import (
    FluxField,
    ManufacturedField,
    classical_p_laplacian,
    convergence_order,
    finsler_p_laplacian,
    flux,
    flux_euler_defect,
    pde_residual,
)
from finsler.types import BadParameter, DegenerateRegion


def quadratic_gradient(x):
    """Gradient of u = x1^2 + 2 x2^2."""
    return np.atleast_2d(x) * np.array([2.0, 4.0])


def quadratic(x):
    points = np.atleast_2d(x)
    return points[:, 0] ** 2 + 2.0 * points[:, 1] ** 2


class TestFlux:
    def test_euclidean_p2_flux_is_the_gradient(self, euclidean):
        field = FluxField(euclidean, 2.0, np.atleast_2d)
        np.testing.assert_allclose(flux(field, [3.0, 4.0]), [3.0, 4.0])

    def test_flux_vanishes_with_the_gradient(self, shifted):
        field = FluxField(shifted, 3.0, lambda x: np.zeros_like(x))
        np.testing.assert_array_equal(flux(field, [1.0, 2.0]), [0.0, 0.0])

    def test_lifted_euler_identity(self, shifted, rng):
        field = FluxField(shifted, 2.7, np.atleast_2d)
        x = rng.standard_normal((50, 2))
        assert np.max(flux_euler_defect(field, x)) < 1e-12

    def test_exponent_must_exceed_one(self, euclidean):
        with pytest.raises(BadParameter):
            FluxField(euclidean, 1.0, np.atleast_2d)


class TestFinslerPLaplacian:
    def test_euclidean_laplacian(self, euclidean):
        field = FluxField(euclidean, 2.0, quadratic_gradient)
        estimate = finsler_p_laplacian(field, [0.7, -0.4])
        assert estimate.value == pytest.approx(6.0, rel=1e-8)

    def test_matches_the_classical_p_laplacian(self, euclidean):
        field = FluxField(euclidean, 3.0, quadratic_gradient)
        x = np.array([[0.7, -0.4], [1.5, 0.2]])
        finsler = finsler_p_laplacian(field, x).value
        classical = classical_p_laplacian(quadratic, x, 3.0)
        np.testing.assert_allclose(finsler, classical, rtol=1e-6)

    def test_scalar_field_gradient(self, euclidean):
        field = FluxField.from_scalar(euclidean, 2.0, quadratic)
        np.testing.assert_allclose(
            field.gradient(np.array([[1.0, 1.0]])), [[2.0, 4.0]], rtol=1e-6
        )

    def test_richardson_improves_on_the_raw_stencil(self, shifted_gauge):
        manufactured = ManufacturedField.dual_quadratic(shifted_gauge, 3.0)
        x = np.array([0.8, 0.3])
        exact = -float(manufactured.source(x)[0])
        raw = finsler_p_laplacian(manufactured.field, x, h=1e-2)
        assert abs(raw.value - exact) < abs(raw.coarse - exact)

    def test_degenerate_stencil(self, euclidean):
        field = FluxField(euclidean, 3.0, lambda x: np.zeros_like(x))
        with pytest.raises(DegenerateRegion):
            finsler_p_laplacian(field, [0.0, 0.0])


class TestManufacturedField:
    @pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
    def test_dual_quadratic_source(self, shifted_gauge, p):
        manufactured = ManufacturedField.dual_quadratic(shifted_gauge, p)
        x = np.array([[0.8, 0.3], [-1.2, 0.5]])
        value = finsler_p_laplacian(manufactured.field, x).value
        np.testing.assert_allclose(
            -value, manufactured.source(x), rtol=1e-6
        )

    def test_linear_field_has_no_source(self, ellipse):
        manufactured = ManufacturedField.linear(ellipse, 3.0, [1.0, -0.5])
        value = finsler_p_laplacian(manufactured.field, [0.3, 0.2]).value
        assert value == pytest.approx(0.0, abs=1e-8)

    def test_linear_field_needs_a_slope(self, ellipse):
        with pytest.raises(BadParameter):
            ManufacturedField.linear(ellipse, 3.0, [0.0, 0.0])


class TestPdeResidual:
    def test_explicit_solution_solves_the_equation(self, shifted_solution):
        sol = shifted_solution
        omega = np.array([[1.0, 0.0], [0.3, -0.9], [-0.6, 0.6]])
        directions = omega / sol.gauge.reversed_value(omega)[:, None]
        for rho in (0.1, 1.0, 10.0):
            x = sol.center + rho * directions
            estimate = pde_residual(sol, x)
            assert np.max(estimate.relative) < 1e-6

    def test_second_order_stencil(self, solution):
        x = np.array([[0.1, 0.05], [0.2, -0.1]])
        estimate = pde_residual(solution, x)
        order = convergence_order(
            estimate.coarse / estimate.exp_u, estimate.fine / estimate.exp_u
        )
        assert order == pytest.approx(2.0, abs=0.1)

    def test_rejects_points_near_the_center(self, solution):
        with pytest.raises(DegenerateRegion) as exc_info:
            pde_residual(solution, [1e-3, 0.0])
        assert exc_info.value.output["rho_min"] == pytest.approx(1e-3)

    def test_rejects_far_points(self, solution):
        with pytest.raises(DegenerateRegion):
            pde_residual(solution, [2e3, 0.0])


class TestConvergenceOrder:
    def test_quarter_error_is_second_order(self):
        assert convergence_order([4.0, -4.0], [1.0, 1.0]) == pytest.approx(2)

    def test_exact_fine_residual(self):
        assert math.isinf(convergence_order([1.0], [0.0]))
