import zlib

import pytest

from finsler._internal.check import Check
from finsler.config import RunConfig
from finsler.run_context import RunContext
from finsler.types import (
    BadParameter,
    CheckResult,
    CheckStatus,
    NoConvergence,
)


def passing_check(ctx: RunContext):
    """Always passes."""
    return CheckResult.compare("ignored", "duality", 1.0, 1.0, 1e-12)


def failing_check(ctx: RunContext):
    raise NoConvergence("quadrature stalled", output={"value": 0.5})


def multi_check(ctx: RunContext):
    return [
        CheckResult.compare("first", "duality", 1.0, 1.0, 0.0),
        CheckResult.compare("second", "duality", 2.0, 1.0, 0.0),
    ]


def crashing_check(ctx: RunContext):
    raise RuntimeError("bug")


class TestRunContext:
    @pytest.fixture(autouse=True)
    def setup(self):
        config = RunConfig.from_sources(
            overrides={"quadrature": {"mc_samples": 4096, "seed": 17}}
        )
        self.ctx = RunContext.from_config(config)
        yield
        self.ctx = None

    def test_from_config_builds_the_solution(self):
        assert self.ctx.dimension == 2
        assert self.ctx.smooth
        assert self.ctx.solution.lam == 1.0
        assert self.ctx.gauge.base is self.ctx.norm

    def test_seed_for_mixes_in_the_check_name(self):
        expected = (17 + zlib.crc32(b"mass_quantization")) % 2**64
        assert self.ctx.seed_for("mass_quantization") == expected
        assert self.ctx.seed_for("a") != self.ctx.seed_for("b")

    def test_quadrature_for(self):
        cfg = self.ctx.quadrature_for("wulff_volume")
        assert cfg.seed == self.ctx.seed_for("wulff_volume")
        assert cfg.mc_samples == 4096

    def test_applicable(self):
        assert self.ctx.applicable(Check(passing_check, "s", "duality")) == (
            True,
            None,
        )
        only_3d = Check(passing_check, "s", "duality", dimensions=(3,))
        ok, reason = self.ctx.applicable(only_3d)
        assert not ok
        assert "N in [3]" in reason

    def test_tabulated_gauges_skip_smooth_checks(self, norm_file):
        path = norm_file(
            {
                "family": "custom_tabulated",
                "boundary_points": [[1, 0], [0, 1], [-1, 0], [0, -1]],
            }
        )
        ctx = RunContext.from_config(
            RunConfig.from_sources(overrides={"norm_path": path})
        )
        ok, reason = ctx.applicable(
            Check(passing_check, "s", "duality", smooth=True)
        )
        assert not ok
        assert reason == "needs a smooth gauge"

    async def test_execute_check_renames_single_results(self):
        results = await self.ctx.execute_check(
            Check(passing_check, "s", "duality")
        )
        assert [r.name for r in results] == ["passing_check"]
        assert [log.status for log in self.ctx.log] == [
            CheckStatus.STARTED,
            CheckStatus.COMPLETED,
        ]
        assert "passing_check" in self.ctx.timings

    async def test_execute_check_keeps_result_lists(self):
        results = await self.ctx.execute_check(
            Check(multi_check, "s", "duality")
        )
        assert [r.name for r in results] == ["first", "second"]
        assert [r.passed for r in results] == [True, False]

    async def test_numerical_errors_become_failed_results(self):
        check = Check(failing_check, "s", "flux_balance", tolerance=1e-6)
        results = await self.ctx.execute_check(check)
        assert len(results) == 1
        result = results[0]
        assert not result.passed
        assert result.tolerance == 1e-6
        assert result.seed == self.ctx.seed_for("failing_check")
        assert result.details["error"]["output"] == {"value": 0.5}
        assert self.ctx.log[-1].status is CheckStatus.FAILED
        assert self.ctx.log[-1].error["code"] == "no_convergence"

    async def test_other_exceptions_propagate(self):
        with pytest.raises(RuntimeError):
            await self.ctx.execute_check(Check(crashing_check, "s", "duality"))

    async def test_run_checks_skips_inapplicable_checks(self):
        checks = [
            Check(passing_check, "s", "duality"),
            Check(multi_check, "s", "duality", dimensions=(4, 5)),
        ]
        report = await self.ctx.run_checks(checks)
        assert [c.name for c in report.checks] == ["passing_check"]
        skipped = [
            log for log in self.ctx.log if log.status is CheckStatus.SKIPPED
        ]
        assert [log.check for log in skipped] == ["multi_check"]
        assert report.passed

    def test_run_builds_a_sorted_report(self):
        checks = [
            Check(multi_check, "s", "duality"),
            Check(failing_check, "s", "flux_balance"),
        ]
        report = self.ctx.run(checks)
        assert [c.name for c in report.checks] == [
            "failing_check",
            "first",
            "second",
        ]
        assert not report.passed
        assert report.norm == {"family": "euclidean", "dimension": 2}
        assert report.config["quadrature"]["seed"] == 17

    def test_bad_norm_parameters(self, norm_file):
        path = norm_file({"family": "pnorm", "p": 0.5})
        config = RunConfig.from_sources(overrides={"norm_path": path})
        with pytest.raises(BadParameter):
            RunContext.from_config(config)
