import math

import numpy as np
import pytest

from forchbound.bounds.curves import RiccatiBound, alpha_bound_curve, c_alpha_beta
from forchbound.core.grid import Grid, SpatialField, TimeSeries
from forchbound.core.lognum import ONE, LogNumber
from forchbound.models.base import ConfigError

FLAT_M = TimeSeries.from_lists([0.0, 1.0], [1.0, 1.0])


def riccati(zstar: float, M: TimeSeries = FLAT_M) -> RiccatiBound:
    return RiccatiBound(LogNumber.from_value(zstar), 37.5, 40.0, ONE, M)


def test_threshold_and_curve_in_closed_form() -> None:
    ric = riccati(80.0)
    assert ric.threshold == pytest.approx(40.0 / 9000.0, rel=1e-12)
    half = ric.threshold / 2.0
    assert ric.v_at(half).value == pytest.approx(2.0 ** (16.0 / 15.0), rel=1e-12)
    assert ric.log_v(2.0 * ric.threshold) == math.inf
    assert ric.fraction(half) == pytest.approx(0.5)


def test_rk4_oracle_tracks_the_closed_form() -> None:
    ric = riccati(80.0)
    grid = np.linspace(0.0, 0.9 * ric.threshold, 7)
    closed = np.array([ric.log_v(float(t)) for t in grid])
    np.testing.assert_allclose(np.exp(ric.rk4_log_v(grid)), np.exp(closed), rtol=1e-2)


@pytest.mark.parametrize("seed", range(10))
def test_rk4_oracle_on_random_inputs(seed: int) -> None:
    rng = np.random.default_rng(seed)
    zstar = LogNumber(rng.uniform(0.0, 10.0))
    mu = rng.uniform(0.5, 40.0)
    alpha = rng.uniform(2.0, 60.0)
    V0 = LogNumber(rng.uniform(0.0, 5.0))
    m0 = rng.uniform(1.0, 3.0)
    k = rng.uniform(0.0, 2.0)
    flat = TimeSeries.from_lists([0.0, 1.0], [m0, m0])
    T0 = RiccatiBound(zstar, mu, alpha, V0, flat).threshold
    M = TimeSeries.from_lists([0.0, 2.0 * T0], [m0, m0 * (1.0 + k)])
    ric = RiccatiBound(zstar, mu, alpha, V0, M)
    assert 0.0 < ric.threshold <= T0
    grid = np.linspace(0.0, 0.9 * ric.threshold, 7)
    closed = np.array([ric.log_v(float(t)) for t in grid])
    assert np.max(np.abs(ric.rk4_log_v(grid) - closed)) <= math.log1p(0.01)


def test_threshold_on_a_linear_m() -> None:
    rising = TimeSeries.from_lists([0.0, 1.0], [1.0, 2.0])
    # budget 1/2: T + T^2/2 = 1/2
    inside = riccati(40.0 / (3.0 * 37.5 * 0.5), rising)
    assert inside.threshold == pytest.approx(math.sqrt(2.0) - 1.0, rel=1e-12)
    # budget 2 runs past the last sample, where M is held at 2
    beyond = riccati(40.0 / (3.0 * 37.5 * 2.0), rising)
    assert beyond.threshold == pytest.approx(1.25, rel=1e-12)


def test_astronomical_zstar_stays_in_log_space() -> None:
    ric = RiccatiBound(LogNumber(2000.0), 37.5, 40.0, ONE, FLAT_M)
    assert ric.threshold == 0.0
    assert ric.log_threshold == pytest.approx(math.log(40.0 / 112.5) - 2000.0)


@pytest.mark.parametrize(
    "V0, M",
    [
        (LogNumber.from_value(0.5), FLAT_M),
        (ONE, TimeSeries.from_lists([0.0, 1.0], [0.5, 1.0])),
        (ONE, TimeSeries.from_lists([0.1, 1.0], [1.0, 1.0])),
    ],
)
def test_invalid_riccati_inputs(V0: LogNumber, M: TimeSeries) -> None:
    with pytest.raises(ConfigError):
        RiccatiBound(ONE, 37.5, 40.0, V0, M)


def test_alpha_curve_report(chain) -> None:
    report = chain.report
    assert report.times[-1] == pytest.approx(0.999 * report.T_threshold)
    assert report.notes and "0.999" in report.notes[0]
    assert np.all(np.diff(report.log_v) > 0)
    assert report.log_v[0] == pytest.approx(math.log(2.0))
    rows = report.curve_rows()
    assert set(rows[0]) == {"t", "V", "log_V"}


def test_l_beta_curve_and_oracle(chain) -> None:
    T = 0.5 * chain.report.T_threshold
    report = alpha_bound_curve(
        chain.book,
        chain.proof,
        chain.report.V0,
        chain.integrals.M,
        T,
        beta=2.0,
        phi=chain.scenario.phi,
        points=11,
        oracle=True,
    )
    assert report.times[-1] == T and not report.notes
    assert report.C_alpha_beta is not None
    assert report.C_alpha_beta.value == pytest.approx(1.0)
    assert report.log_ube is not None and report.log_oracle is not None
    np.testing.assert_allclose(report.log_ube, 2.0 / report.alpha * report.log_v)
    np.testing.assert_allclose(report.log_oracle, report.log_v, rtol=1e-2)
    assert set(report.curve_rows()[-1]) == {"t", "V", "log_V", "L_beta_bound", "V_rk4"}


def test_c_alpha_beta(grid8: Grid) -> None:
    phi = SpatialField.constant(grid8, 4.0)
    assert c_alpha_beta(phi, 3.0, 1.0).value == pytest.approx(0.5)
    with pytest.raises(ConfigError):
        c_alpha_beta(phi, 3.0, 3.0)
