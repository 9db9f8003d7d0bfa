import math

from finsler._internal.check import Check
from finsler.config import RunConfig
from finsler.run_context import RunContext
from finsler.types import CheckResult


def single(ctx: RunContext):
    """Quantized mass of the configured solution."""
    return CheckResult.compare(
        "renamed_away",
        "mass_quantization",
        ctx.solution.mass,
        8 * math.pi,
        1e-9,
    )


def several(ctx: RunContext):
    return (
        CheckResult.compare("left", "duality", 0.0, 0.0, 0.0),
        CheckResult.compare("right", "duality", 0.0, 0.0, 0.0),
    )


class TestCheck:
    def setup_method(self):
        self.ctx = RunContext.from_config(RunConfig())

    def test_metadata(self):
        check = Check(single, "quantization", "mass_quantization", [3, 2])
        assert check.name == "single"
        assert check.suite == "quantization"
        assert check.dimensions == frozenset({2, 3})
        assert check.description.startswith("Quantized mass")
        assert math.isnan(check.tolerance)

    def test_run_renames_a_single_result(self):
        results = Check(single, "s", "mass_quantization").run(self.ctx)
        assert len(results) == 1
        assert results[0].name == "single"
        assert results[0].passed

    def test_run_keeps_result_names_of_lists(self):
        results = Check(several, "s", "duality").run(self.ctx)
        assert [r.name for r in results] == ["left", "right"]

    def test_describe(self):
        check = Check(several, "s", "duality", smooth=True, tolerance=0.5)
        assert check.describe() == {
            "name": "several",
            "anchor": "duality",
            "statement": "",
            "identity": "",
            "description": "",
            "dimensions": [],
            "smooth": True,
            "tolerance": 0.5,
        }
