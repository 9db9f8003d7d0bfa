import pytest

import finsler.suites  # noqa: F401
from finsler._internal.registry import CheckRegistry
from finsler.config import RunConfig
from finsler.run_context import RunContext
from finsler.types import CheckStatus

GRID_CHECKS = {
    "dual_identities",
    "dual_closed_form",
    "wulff_perimeter",
    "mass_lower_bound",
    "wulff_pohozaev",
    "level_formulas",
    "flux_balance",
}
# boundary quadrature exists in 2D and 3D only
BOUNDARY_CHECKS = {"wulff_perimeter", "flux_balance"}


def norm_spec(family: str, dimension: int) -> dict:
    if family == "ellipse":
        matrix = [[0.0] * dimension for _ in range(dimension)]
        for i in range(dimension):
            matrix[i][i] = 4.0 if i == 0 else 1.0
        return {"family": "ellipse", "matrix": matrix}
    if family == "pnorm":
        return {"family": "pnorm", "p": 3.0}
    if family == "shifted":
        return {"family": "shifted", "b": [0.5] + [0.0] * (dimension - 1)}
    return {"family": "euclidean"}


class TestSuitesAcrossDimensions:
    @pytest.mark.parametrize("dimension", [2, 3, 4])
    @pytest.mark.parametrize(
        "family", ["euclidean", "ellipse", "pnorm", "shifted"]
    )
    def test_core_checks_pass(self, family, dimension):
        config = RunConfig.from_sources(
            overrides={
                "norm": norm_spec(family, dimension),
                "solution": {"N": dimension},
            }
        )
        ctx = RunContext.from_config(config)
        checks = [
            check
            for suite in CheckRegistry().get_suites().values()
            for check in suite
            if check.name in GRID_CHECKS
        ]

        report = ctx.run(checks)

        completed = {
            entry.check
            for entry in report.log
            if entry.status is CheckStatus.COMPLETED
        }
        expected = set(GRID_CHECKS)
        if dimension == 4:
            expected -= BOUNDARY_CHECKS
        assert completed == expected
        failed = [c.name for c in report.checks if not c.passed]
        assert failed == []
