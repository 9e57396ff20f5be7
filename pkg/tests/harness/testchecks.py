import numpy as np
import pytest

from forchbound.core.grid import Grid, SpatialField
from forchbound.harness.calibrate import EmbeddingConstants, calibrate_constants
from forchbound.harness.checks import (
    check_parabolic_sobolev,
    check_trace_simple,
    check_trace_two_weight,
    check_weighted_sobolev,
)
from forchbound.harness.family import TestFunctionFamily
from forchbound.harness.params import SobolevParams
from forchbound.harness.suite import time_varying_samples
from forchbound.models.base import AdmissibilityError, ConfigError

PARAMS = SobolevParams(2, 1.5, 2.0 / 3.0, 1.5, 1.0, 40.0, 1.0)


@pytest.fixture
def consts(grid16: Grid) -> EmbeddingConstants:
    return calibrate_constants(grid16, 2.0 / 3.0, 1.5, TestFunctionFamily(count=12))


@pytest.fixture
def bump(grid16: Grid) -> SpatialField:
    return SpatialField.from_function(
        grid16, lambda x, y: 1.0 + np.exp(-((x - 0.3) ** 2 + (y - 0.6) ** 2) / 0.02)
    )


def test_zero_function_passes_every_check(
    grid16: Grid, consts: EmbeddingConstants
) -> None:
    zero = SpatialField.constant(grid16, 0.0)
    report = check_weighted_sobolev(zero, 1.0, 1.0, 0.5, PARAMS, consts, "zero")
    assert report.passed
    assert report.records[0].lhs == 0.0


def test_stationary_checks_hold_for_a_bump(
    grid16: Grid, consts: EmbeddingConstants, bump: SpatialField
) -> None:
    reports = [
        check_weighted_sobolev(bump, 1.0, 1.0, 0.5, PARAMS, consts),
        check_trace_simple(bump, 0.5, 40.0, 1.5, 1.5, 1.0, consts),
        check_trace_two_weight(bump, 1.0, 0.5, PARAMS, consts),
    ]
    for report in reports:
        record = report.records[0]
        assert report.passed, (record.check_name, record.lhs, record.rhs)
        assert record.margin >= 0
    assert reports[2].records[0].branch == "nonnegative"
    assert reports[0].params["theta"] == pytest.approx(0.84)


def test_sabotaged_constants_fail(grid16: Grid, consts: EmbeddingConstants) -> None:
    one = SpatialField.constant(grid16, 1.0)
    report = check_weighted_sobolev(
        one, 1.0, 1.0, 0.5, PARAMS, consts.divided(1e10), "constant"
    )
    assert not report.passed
    assert report.failures[0].margin < 0
    assert "constants" in report.note


def test_parabolic_check_on_time_samples(
    grid16: Grid, consts: EmbeddingConstants
) -> None:
    sample = TestFunctionFamily(count=3).members(2)[2].sample(grid16)
    series = time_varying_samples(sample, 1.0)
    assert len(series) == 11
    np.testing.assert_allclose(series[0][1].values, 1.0)
    report = check_parabolic_sobolev(series, 1.0, 0.5, PARAMS, consts, 1.0, "bump")
    assert report.passed
    with pytest.raises(ConfigError):
        check_parabolic_sobolev(series[:1], 1.0, 0.5, PARAMS, consts, 1.0)
    with pytest.raises(ConfigError):
        check_parabolic_sobolev(series, 1.0, 0.5, PARAMS, consts, 0.5)


def test_inadmissible_checks_raise(grid16: Grid, consts: EmbeddingConstants) -> None:
    one = SpatialField.constant(grid16, 1.0)
    with pytest.raises(AdmissibilityError):
        check_trace_simple(one, 0.5, 1.0, 1.5, 1.5, 1.0, consts)
    with pytest.raises(AdmissibilityError):
        check_trace_simple(one, 0.5, 40.0, 1.5, 1.5, 0.0, consts)
    with pytest.raises(ConfigError):
        check_weighted_sobolev(one, -1.0, 1.0, 0.5, PARAMS, consts)
