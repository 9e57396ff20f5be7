import math

import pytest

from forchbound.core.lognum import ONE, ZERO, LogNumber, log_max


def test_products_stay_exact_beyond_float_range() -> None:
    big = LogNumber(800.0)
    assert (big * big).log == pytest.approx(1600.0)
    assert (big * big).value == math.inf
    assert (big / big).log == pytest.approx(0.0)
    assert (big**0.5).log == pytest.approx(400.0)


def test_sum_goes_through_logaddexp() -> None:
    s = LogNumber.from_value(2.0) + 3.0
    assert s.value == pytest.approx(5.0)
    assert (LogNumber(1000.0) + LogNumber(1000.0)).log == pytest.approx(
        1000.0 + math.log(2.0)
    )


def test_zero_handling() -> None:
    assert LogNumber.from_value(0).is_zero
    assert (ZERO * LogNumber(1e6)).is_zero
    assert (ZERO + 2.0).value == pytest.approx(2.0)
    assert ZERO**0 == ONE
    with pytest.raises(ZeroDivisionError):
        ONE / ZERO
    with pytest.raises(ZeroDivisionError):
        ZERO**-1.0


def test_negative_values_rejected() -> None:
    with pytest.raises(ValueError):
        LogNumber.from_value(-1.0)


def test_ordering_and_max() -> None:
    assert LogNumber(3.0) > LogNumber(2.0)
    assert log_max([1.0, LogNumber(5.0), 7.0]).value == pytest.approx(math.exp(5.0))


def test_to_dict_and_log10() -> None:
    x = LogNumber.from_value(1000.0)
    assert x.log10 == pytest.approx(3.0)
    assert x.to_dict() == {"value": pytest.approx(1000.0), "log": pytest.approx(x.log)}
