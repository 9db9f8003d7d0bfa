import json
import math

import numpy as np
import pytest

from finsler import (
    DualGauge,
    EllipseNorm,
    EuclideanNorm,
    LiouvilleSolution,
    PNorm,
    QuadratureConfig,
    ShiftedNorm,
    TabulatedNorm,
)
from finsler._internal.registry import CheckRegistry

FAST_MC_SAMPLES = 2**16


@pytest.fixture
def euclidean():
    return EuclideanNorm(2)


@pytest.fixture
def ellipse():
    return EllipseNorm([[4.0, 0.0], [0.0, 1.0]])


@pytest.fixture
def shifted():
    return ShiftedNorm([0.5, 0.0])


@pytest.fixture
def pnorm():
    return PNorm(2, 3.0)


@pytest.fixture
def square_norm():
    """The l-infinity gauge as a tabulated square."""
    return TabulatedNorm([[1, 1], [-1, 1], [-1, -1], [1, -1]])


@pytest.fixture
def euclidean_gauge(euclidean):
    return DualGauge(euclidean)


@pytest.fixture
def shifted_gauge(shifted):
    return DualGauge(shifted)


@pytest.fixture
def ellipse_gauge(ellipse):
    return DualGauge(ellipse)


@pytest.fixture
def solution(euclidean_gauge):
    """u = log 8 - 2 log(1 + |x|^2), the classical 2D solution."""
    return LiouvilleSolution.create(euclidean_gauge, 1.0)


@pytest.fixture
def shifted_solution(shifted_gauge):
    return LiouvilleSolution.create(shifted_gauge, 0.7, [0.2, -0.1])


@pytest.fixture
def solution_4d():
    gauge = DualGauge(EuclideanNorm(4))
    return LiouvilleSolution.create(
        gauge, 1.0, wulff_unit_volume=math.pi**2 / 2.0
    )


@pytest.fixture
def fast_cfg():
    return QuadratureConfig(mc_samples=FAST_MC_SAMPLES)


@pytest.fixture
def norm_file(tmp_path):
    def write(spec: dict, name: str = "norm.json") -> str:
        path = tmp_path / name
        path.write_text(json.dumps(spec))
        return str(path)

    return write


@pytest.fixture
def isolated_registry():
    """Empty the registry for one test and restore the suites afterwards"""
    registry = CheckRegistry()
    suites = {name: list(checks) for name, checks in registry._suites.items()}
    router = registry.get_router()
    registry.clear()

    yield CheckRegistry()

    restored = CheckRegistry()
    restored._suites.clear()
    restored._suites.update(suites)
    restored._router = router


@pytest.fixture
def rng():
    return np.random.Generator(np.random.Philox(1234))
