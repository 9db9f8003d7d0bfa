import math

import numpy as np
import pytest

from finsler.anisotropy import EuclideanNorm
from finsler.config import QuadratureConfig
from finsler.dual_geometry import DualGauge, WulffShape
from finsler.quadrature import (
    adaptive_interval,
    gauss_kronrod,
    mass_radial_integral,
    monte_carlo_mass,
    radial_improper,
    wulff_interior,
)
from finsler.solution import LiouvilleSolution
from finsler.types import BadParameter, ToleranceNotMet


class TestGaussKronrod:
    def test_exact_for_polynomials(self):
        value, error = gauss_kronrod(lambda x: x**5, 0.0, 1.0)
        assert value == pytest.approx(1 / 6, rel=1e-14)
        assert error < 1e-12

    def test_adaptive_sine(self):
        result = adaptive_interval(np.sin, 0.0, math.pi, rtol=1e-12)
        assert result.converged
        assert result.value == pytest.approx(2.0, rel=1e-12)
        assert result.evaluations >= 15

    def test_endpoint_singularity(self):
        result = adaptive_interval(lambda x: 1.0 / np.sqrt(x), 0.0, 1.0)
        assert result.value == pytest.approx(2.0, rel=1e-8)

    def test_subdivision_cap(self):
        result = adaptive_interval(
            lambda x: np.sin(200.0 * x),
            0.0,
            1.0,
            rtol=1e-12,
            max_subdivisions=1,
        )
        assert not result.converged


class TestRadialImproper:
    def test_exponential(self):
        result = radial_improper(lambda r: np.exp(-r))
        assert result.converged
        assert result.value == pytest.approx(1.0, rel=1e-9)

    def test_algebraic_tail(self):
        result = radial_improper(lambda r: 1.0 / (1.0 + r * r))
        assert result.value == pytest.approx(math.pi / 2, rel=1e-8)

    def test_strict_failure_reports_the_best_estimate(self):
        cfg = QuadratureConfig(relative_tolerance=1e-14, max_subdivisions=1)
        with pytest.raises(ToleranceNotMet) as exc_info:
            radial_improper(lambda r: np.exp(-r), cfg)
        output = exc_info.value.output
        assert output["converged"] is False
        assert output["value"] == pytest.approx(1.0, rel=1e-2)

    def test_lenient_failure(self):
        cfg = QuadratureConfig(relative_tolerance=1e-14, max_subdivisions=1)
        result = radial_improper(lambda r: np.exp(-r), cfg, strict=False)
        assert not result.converged


class TestMass:
    def test_radial_mass_of_the_classical_solution(self, solution):
        # ∫_0^inf 8 rho/(1+rho^2)^2 = 4
        assert mass_radial_integral(solution).value == pytest.approx(
            4.0, rel=1e-8
        )

    def test_radial_mass_is_lambda_invariant(self, shifted_gauge):
        masses = []
        for lam in (1e-2, 1.0, 50.0):
            sol = LiouvilleSolution.create(shifted_gauge, lam)
            result = mass_radial_integral(sol)
            masses.append(2 * sol.wulff_unit_volume * result.value)
        np.testing.assert_allclose(masses, 8 * math.pi, rtol=1e-8)

    def test_monte_carlo_mass(self, shifted_solution, fast_cfg):
        estimate = monte_carlo_mass(shifted_solution, fast_cfg)
        assert estimate.samples == fast_cfg.mc_samples
        assert estimate.sigmas_from(shifted_solution.mass) < 5.0
        assert estimate.std_error / estimate.value < 1e-2

    def test_proposal_is_exact_for_the_euclidean_disk(self, solution):
        cfg = QuadratureConfig(mc_samples=2**10)
        estimate = monte_carlo_mass(solution, cfg)
        assert estimate.value == pytest.approx(8 * math.pi, rel=1e-12)

    def test_monte_carlo_is_bit_stable(self, shifted_solution):
        cfg = QuadratureConfig(mc_samples=2**18 + 2**12, seed=11)
        serial = monte_carlo_mass(shifted_solution, cfg, workers=1)
        threaded = monte_carlo_mass(shifted_solution, cfg, workers=2)
        assert serial == threaded

    def test_seed_changes_the_estimate(self, shifted_solution):
        sol = shifted_solution
        first = monte_carlo_mass(sol, QuadratureConfig(mc_samples=2**12))
        second = monte_carlo_mass(
            sol, QuadratureConfig(mc_samples=2**12, seed=1)
        )
        assert first.value != second.value

    def test_monte_carlo_on_a_level_set(self, shifted_solution, fast_cfg):
        sol = shifted_solution
        t = sol.t0 - 1.0
        estimate = monte_carlo_mass(sol, fast_cfg, radius=sol.level_radius(t))
        assert estimate.sigmas_from(sol.level_mass(t)) < 5.0

    def test_monte_carlo_dimension_cap(self):
        gauge = DualGauge(EuclideanNorm(7))
        sol = LiouvilleSolution.create(gauge, 1.0, wulff_unit_volume=4.72)
        with pytest.raises(BadParameter):
            monte_carlo_mass(sol, QuadratureConfig(mc_samples=2**10))


class TestWulffInterior:
    def test_disk_area(self, euclidean_gauge):
        shape = WulffShape([1.0, -1.0], 2.0, euclidean_gauge)
        result = wulff_interior(shape, lambda x: np.ones(len(x)))
        assert result.converged
        assert result.value == pytest.approx(4 * math.pi, rel=1e-9)

    def test_annulus(self, euclidean_gauge):
        shape = WulffShape([0.0, 0.0], 2.0, euclidean_gauge)
        result = wulff_interior(
            shape, lambda x: np.ones(len(x)), inner_radius=1.0
        )
        assert result.value == pytest.approx(3 * math.pi, rel=1e-9)

    def test_level_mass(self, shifted_solution):
        sol = shifted_solution
        t = sol.t0 - 2.0
        result = wulff_interior(
            sol.level_set(t), lambda x: np.exp(sol.value(x))
        )
        assert result.value == pytest.approx(sol.level_mass(t), rel=1e-8)

    def test_ball_volume_in_3d(self):
        gauge = DualGauge(EuclideanNorm(3))
        shape = WulffShape(np.zeros(3), 1.0, gauge)
        result = wulff_interior(shape, lambda x: np.ones(len(x)))
        assert result.value == pytest.approx(4 * math.pi / 3, rel=1e-9)

    def test_rejects_high_dimensions(self):
        gauge = DualGauge(EuclideanNorm(4))
        shape = WulffShape(np.zeros(4), 1.0, gauge)
        with pytest.raises(BadParameter):
            wulff_interior(shape, lambda x: np.ones(len(x)))

    def test_rejects_bad_inner_radius(self, euclidean_gauge):
        shape = WulffShape([0.0, 0.0], 1.0, euclidean_gauge)
        with pytest.raises(BadParameter):
            wulff_interior(shape, lambda x: np.ones(len(x)), inner_radius=1)
