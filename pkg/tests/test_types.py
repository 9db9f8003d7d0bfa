import math

import pytest

from finsler.types import (
    AboveMaximum,
    BadParameter,
    CheckLog,
    CheckResult,
    CheckStatus,
    Comparison,
    ConfigError,
    MonteCarloEstimate,
    NoConvergence,
    VerificationReport,
    ZeroVector,
)


class TestCheckResult:
    def test_relative_error_against_the_target(self):
        result = CheckResult.compare("mass", "mass", 8.8, 8.0, 0.2)
        assert result.abs_err == pytest.approx(0.8)
        assert result.rel_err == pytest.approx(0.1)
        assert result.passed

    def test_zero_target_uses_the_absolute_error(self):
        result = CheckResult.compare("euler", "gauge_axioms", 3e-9, 0.0, 1e-8)
        assert result.rel_err == pytest.approx(3e-9)
        assert result.passed

    def test_scalar_tolerance_reports_the_worst_component(self):
        result = CheckResult.compare(
            "level", "level_formulas", [1.0, 1.5], [1.0, 1.0], 0.6
        )
        assert result.rel_err == pytest.approx(0.5)
        assert result.computed == [1.0, 1.5]
        assert result.passed

    def test_per_component_tolerance(self):
        result = CheckResult.compare(
            "asym", "asymptotics", [4.0, 0.01], [4.0, 0.0], [1e-6, 1e-3]
        )
        assert result.rel_err == [0.0, pytest.approx(0.01)]
        assert result.tolerance == [1e-6, 1e-3]
        assert not result.passed

    def test_at_least_only_penalises_violations(self):
        above = CheckResult.compare(
            "q", "isoperimetric", 1.2, 1.0, 0.0, Comparison.AT_LEAST
        )
        below = CheckResult.compare(
            "q", "isoperimetric", 0.9, 1.0, 0.0, Comparison.AT_LEAST
        )
        assert above.passed and above.abs_err == 0.0
        assert not below.passed
        assert below.abs_err == pytest.approx(0.1)

    def test_at_most(self):
        result = CheckResult.compare(
            "tail", "upper_bound", -3.0, 0.0, 0.0, Comparison.AT_MOST
        )
        assert result.passed

    def test_non_finite_values_fail(self):
        result = CheckResult.compare("x", "pde_residual", math.nan, 1.0, 1.0)
        assert math.isinf(result.rel_err)
        assert not result.passed

    def test_from_failure(self):
        error = NoConvergence("gave up", output={"value": 1.0})
        result = CheckResult.from_failure("flux", "flux_balance", 1e-6, error)
        assert not result.passed
        assert math.isnan(result.computed)
        assert result.details["error"]["code"] == "no_convergence"

    def test_dict_round_trip_keeps_the_comparison(self):
        result = CheckResult.compare(
            "q", "isoperimetric", 1.2, 1.0, 1e-6, Comparison.AT_LEAST, seed=3
        )
        data = result.to_dict()
        assert data["tol"] == 1e-6
        assert data["comparison"] == "at_least"
        assert CheckResult.from_dict(data) == result


class TestVerificationReport:
    def make_report(self, *passed):
        checks = [
            CheckResult.compare(name, "duality", 0.0, 0.0, 1.0)
            for name in ("b_check", "a_check")
        ]
        for check, ok in zip(checks, passed):
            check.passed = ok
        return VerificationReport(
            version="0.1.0",
            norm={"family": "euclidean"},
            solution={"N": 2},
            config={},
            checks=checks,
            timings={"a_check": 0.5},
            log=[CheckLog(CheckStatus.COMPLETED, "a_check", elapsed=0.5)],
        )

    def test_passed_needs_every_check(self):
        assert self.make_report(True, True).passed
        assert not self.make_report(True, False).passed

    def test_checks_are_sorted_by_name(self):
        data = self.make_report(True, True).to_dict()
        assert [c["name"] for c in data["checks"]] == ["a_check", "b_check"]
        assert data["log"][0]["status"] == "completed"
        assert data["timings"] == {"a_check": 0.5}

    def test_deterministic_drops_wall_clock_data(self):
        data = self.make_report(True, True).to_dict(deterministic=True)
        assert "timings" not in data
        assert "log" not in data

    def test_from_dict(self):
        report = self.make_report(True, False)
        restored = VerificationReport.from_dict(report.to_dict())
        assert not restored.passed
        assert len(restored.checks) == 2


class TestErrors:
    @pytest.mark.parametrize(
        "error, status",
        [
            (ZeroVector("zero"), 422),
            (BadParameter("bad"), 422),
            (AboveMaximum("above"), 422),
            (ConfigError("config"), 422),
            (NoConvergence("stuck"), 500),
        ],
    )
    def test_status_codes(self, error, status):
        assert error.status_code == status

    def test_to_dict(self):
        error = BadParameter("lambda must be positive", {"lambda": -1})
        assert error.to_dict() == {
            "code": "bad_parameter",
            "message": "lambda must be positive",
            "output": {"lambda": -1},
        }


class TestMonteCarloEstimate:
    def test_sigmas(self):
        estimate = MonteCarloEstimate(10.2, 0.1, 1024, 0)
        assert estimate.sigmas_from(10.0) == pytest.approx(2.0)

    def test_zero_variance(self):
        estimate = MonteCarloEstimate(8.0, 0.0, 1024, 0)
        assert estimate.sigmas_from(8.0) == 0.0
        assert math.isinf(estimate.sigmas_from(8.1))
