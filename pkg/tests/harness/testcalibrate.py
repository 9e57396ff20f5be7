import pytest

from forchbound.core.grid import Grid
from forchbound.harness.calibrate import EmbeddingConstants, calibrate_constants
from forchbound.harness.family import TestFunctionFamily
from forchbound.models.base import AdmissibilityError, DegenerateFamilyError

R1 = 2.0 / 3.0
P = 1.5


def test_zero_gradient_constants_pinned_by_the_unit_function(grid16: Grid) -> None:
    consts = calibrate_constants(grid16, R1, P, TestFunctionFamily(count=8), 2.0)
    # |U| = 1 and |boundary| = 4
    assert consts.c2 == pytest.approx(2.0)
    assert consts.c4 == pytest.approx(2.0)
    assert consts.c5 == pytest.approx(8.0)
    assert min(consts.c1, consts.c3, consts.c6, consts.c7) > 0
    assert consts.provenance == "calibrated"
    assert consts.seed == 42


def test_calibration_is_deterministic(grid16: Grid) -> None:
    family = TestFunctionFamily(seed=5, count=10)
    assert calibrate_constants(grid16, R1, P, family) == calibrate_constants(
        grid16, R1, P, family
    )


def test_safety_factor_scales_every_constant(grid16: Grid) -> None:
    family = TestFunctionFamily(count=6)
    one = calibrate_constants(grid16, R1, P, family, 1.0)
    three = calibrate_constants(grid16, R1, P, family, 3.0)
    for name in ("c1", "c2", "c3", "c4", "c5", "c6", "c7"):
        assert getattr(three, name) == pytest.approx(3.0 * getattr(one, name))


def test_calibration_errors(grid16: Grid) -> None:
    with pytest.raises(DegenerateFamilyError):
        calibrate_constants(grid16, R1, P, TestFunctionFamily(count=0))
    with pytest.raises(AdmissibilityError):
        calibrate_constants(grid16, R1, P, TestFunctionFamily(count=4), 0.5)
    with pytest.raises(AdmissibilityError):
        calibrate_constants(grid16, 0.3, P, TestFunctionFamily(count=4))


def test_constants_must_be_positive() -> None:
    with pytest.raises(AdmissibilityError):
        EmbeddingConstants(1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0)
    sabotaged = EmbeddingConstants(1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0).divided(1e10)
    assert sabotaged.c7 == pytest.approx(1e-10)
    assert "sabotaged" in sabotaged.provenance
