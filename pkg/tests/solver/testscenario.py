import numpy as np
import pytest

from forchbound.core.grid import BoundaryField, Grid, SpatialField
from forchbound.models.base import ConfigError
from forchbound.models.forchheimer import ForchheimerLaw
from forchbound.solver.scenario import Scenario, build_scenario
from forchbound.types.runconfig import loads_config


def scenario(grid: Grid, law: ForchheimerLaw, **overrides: object) -> Scenario:
    values: dict = dict(
        grid=grid,
        law=law,
        phi=SpatialField.constant(grid, 1.0),
        lam=0.5,
        psi=BoundaryField.constant(grid, 0.0),
        u0=SpatialField.constant(grid, 1.0),
        t_final=0.01,
    )
    values.update(overrides)
    return Scenario(**values)


def test_default_direction_is_last_axis(grid8: Grid, ideal_law: ForchheimerLaw) -> None:
    sc = scenario(grid8, ideal_law, cz=1.0)
    assert sc.direction == (0.0, 1.0)
    tilted = scenario(grid8, ideal_law, direction=(3.0, 4.0))
    assert tilted.direction == pytest.approx((0.6, 0.8))
    np.testing.assert_allclose(sc.z_magnitude(np.array([4.0])), [4.0])


@pytest.mark.parametrize(
    "overrides",
    [
        {"lam": 0.0},
        {"t_final": 0.0},
        {"cz": -1.0},
        {"direction": (0.0, 0.0)},
        {"direction": (1.0,)},
    ],
)
def test_invalid_scenarios(
    grid8: Grid, ideal_law: ForchheimerLaw, overrides: dict
) -> None:
    with pytest.raises(ConfigError):
        scenario(grid8, ideal_law, **overrides)


def test_negative_initial_data_rejected(
    grid8: Grid, ideal_law: ForchheimerLaw
) -> None:
    u0 = np.ones(64)
    u0[10] = -1e-3
    with pytest.raises(ConfigError, match="u0 must be nonnegative"):
        scenario(grid8, ideal_law, u0=SpatialField(grid8, u0))


def test_with_horizon_keeps_everything_else(
    grid8: Grid, ideal_law: ForchheimerLaw
) -> None:
    sc = scenario(grid8, ideal_law, cz=0.5, name="x")
    short = sc.with_horizon(1e-6)
    assert short.t_final == 1e-6
    assert (short.cz, short.name, short.direction) == (0.5, "x", sc.direction)


def test_build_from_config() -> None:
    cfg = loads_config(
        """
        [domain]
        n = 2
        cells = [6, 4]
        [law]
        preset = "three_term"
        a = 1.0
        b = 0.0
        c = "preset:linear_x"
        [scenario]
        gamma = 1.5
        psi = "constant:0.5"
        psi_times = [0.0, 1.0]
        psi_scales = [1.0, -1.0]
        """
    )
    sc = build_scenario(cfg)
    assert sc.grid.cells == (6, 4)
    assert sc.lam == pytest.approx(0.4)
    assert sc.degeneracy == pytest.approx(2.0 / 3.0)
    assert not sc.psi.is_static
    assert sc.psi.at(1.0)[0] == pytest.approx(-0.5)
