import json

import pytest
from pydantic import ValidationError

from finsler.config import (
    NormSpec,
    QuadratureConfig,
    RunConfig,
    SolutionSpec,
    load_json,
)
from finsler.types import ConfigError, NormFamily


class TestNormSpec:
    def test_defaults_to_euclidean(self):
        spec = NormSpec()
        assert spec.family is NormFamily.EUCLIDEAN
        assert spec.dimension is None

    def test_dimension_is_inferred(self):
        spec = NormSpec(family="ellipse", matrix=[[4, 0], [0, 1]])
        assert spec.dimension == 2
        assert NormSpec(family="shifted", b=[0.1, 0.2, 0.3]).dimension == 3
        spec = NormSpec(
            family="custom_tabulated",
            boundary_points=[[1, 0], [0, 1], [-1, 0], [0, -1]],
        )
        assert spec.dimension == 2

    @pytest.mark.parametrize(
        "data",
        [
            {"family": "ellipse"},
            {"family": "ellipse", "matrix": [[1, 0]]},
            {"family": "pnorm"},
            {"family": "shifted"},
            {"family": "custom_tabulated", "boundary_points": [[1, 0]]},
            {"family": "shifted", "b": [0.1, 0.2], "dimension": 3},
            {"family": "euclidean", "dimension": 7},
            {"family": "hexagonal"},
        ],
    )
    def test_rejects_bad_parameters(self, data):
        with pytest.raises(ValidationError):
            NormSpec(**data)

    def test_with_dimension(self):
        spec = NormSpec(family="pnorm", p=3).with_dimension(4)
        assert spec.dimension == 4
        with pytest.raises(ConfigError):
            spec.with_dimension(3)

    def test_to_dict(self):
        data = NormSpec(family="pnorm", p=3, dimension=2).to_dict()
        assert data == {"family": "pnorm", "dimension": 2, "p": 3.0}


class TestSolutionSpec:
    def test_aliases(self):
        spec = SolutionSpec.parse_obj({"N": 3, "lambda": 2.5})
        assert spec.dimension == 3
        assert spec.lam == 2.5
        assert spec.center == [0.0, 0.0, 0.0]

    def test_rejects_non_positive_lambda(self):
        with pytest.raises(ValidationError):
            SolutionSpec.parse_obj({"lambda": -1.0})

    def test_rejects_wrong_center(self):
        with pytest.raises(ValidationError):
            SolutionSpec.parse_obj({"N": 2, "center": [0, 0, 0]})


class TestQuadratureConfig:
    def test_defaults(self):
        cfg = QuadratureConfig()
        assert cfg.relative_tolerance == 1e-9
        assert cfg.mc_samples == 2**22

    @pytest.mark.parametrize(
        "data",
        [
            {"relative_tolerance": 0.0},
            {"mc_samples": 100},
            {"seed": -1},
            {"seed": 2**64},
            {"max_subdivisions": 0},
        ],
    )
    def test_rejects(self, data):
        with pytest.raises(ValidationError):
            QuadratureConfig(**data)

    def test_with_seed(self):
        cfg = QuadratureConfig(mc_samples=2**12).with_seed(99)
        assert cfg.seed == 99
        assert cfg.mc_samples == 2**12


class TestRunConfig:
    def test_defaults(self):
        cfg = RunConfig.from_sources()
        assert cfg.suites == ["all"]
        assert cfg.norm.dimension == 2

    def test_flags_override_the_file(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(
            json.dumps(
                {
                    "solution": {"N": 3, "lambda": 2.0},
                    "quadrature": {"seed": 4, "mc_samples": 4096},
                }
            )
        )
        cfg = RunConfig.from_sources(
            str(path),
            {
                "solution": {"lambda": 5.0, "N": None},
                "quadrature": {"seed": 7},
            },
        )
        assert cfg.solution.dimension == 3
        assert cfg.solution.lam == 5.0
        assert cfg.quadrature.seed == 7
        assert cfg.quadrature.mc_samples == 4096
        assert cfg.norm.dimension == 3

    def test_norm_path(self, norm_file):
        path = norm_file({"family": "shifted", "b": [0.5, 0.0]})
        cfg = RunConfig.from_sources(overrides={"norm_path": path})
        assert cfg.norm.family is NormFamily.SHIFTED
        assert cfg.norm.b == [0.5, 0.0]

    def test_norm_dimension_mismatch(self, norm_file):
        path = norm_file({"family": "shifted", "b": [0.5, 0.0, 0.1]})
        with pytest.raises(ConfigError):
            RunConfig.from_sources(overrides={"norm_path": path})

    def test_pohozaev_points_must_match_the_dimension(self):
        with pytest.raises(ConfigError):
            RunConfig.from_sources(overrides={"pohozaev_points": [[0.0]]})

    def test_validation_errors_become_config_errors(self):
        with pytest.raises(ConfigError) as exc_info:
            RunConfig.from_sources(overrides={"solution": {"lambda": -1}})
        assert exc_info.value.output["errors"]

    def test_snapshot(self):
        cfg = RunConfig.from_sources(overrides={"suites": ["duality", "mass"]})
        snapshot = cfg.snapshot()
        assert snapshot["suites"] == ["duality", "mass"]
        assert snapshot["quadrature"]["seed"] == 0


class TestLoadJson:
    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_json(str(tmp_path / "absent.json"))

    def test_malformed_file(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError) as exc_info:
            load_json(str(path))
        assert exc_info.value.output["path"] == str(path)
