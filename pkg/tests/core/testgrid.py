import numpy as np
import pytest

from forchbound.core.grid import BoundaryField, Grid, SpatialField, TimeSeries
from forchbound.models.base import ConfigError


def test_geometry_of_a_box() -> None:
    grid = Grid(2, (4, 2), ((0.0, 2.0), (1.0, 2.0)))
    assert grid.h == (0.5, 0.5)
    assert grid.volume == pytest.approx(2.0)
    assert grid.surface_area == pytest.approx(6.0)
    assert grid.boundary_face_count == 12
    assert grid.boundary_face_areas().sum() == pytest.approx(grid.surface_area)
    np.testing.assert_allclose(grid.axis_centers(0), [0.25, 0.75, 1.25, 1.75])


@pytest.mark.parametrize(
    "n, cells, extents",
    [
        (4, (2, 2, 2, 2), ((0.0, 1.0),) * 4),
        (2, (2,), ((0.0, 1.0),)),
        (2, (0, 2), ((0.0, 1.0), (0.0, 1.0))),
        (1, (3,), ((1.0, 1.0),)),
    ],
)
def test_invalid_grids_rejected(n: int, cells: tuple, extents: tuple) -> None:
    with pytest.raises(ConfigError):
        Grid(n, cells, extents)


def test_cell_budget_comes_from_settings(monkeypatch: pytest.MonkeyPatch) -> None:
    from forchbound.config import get_settings

    monkeypatch.setenv("FORCHBOUND_MAX_CELLS", "100")
    get_settings.cache_clear()
    with pytest.raises(ConfigError, match="budget"):
        Grid.unit(2, 11)


def test_boundary_trace_order(grid8: Grid) -> None:
    values = np.arange(64.0).reshape(8, 8)
    trace = grid8.boundary_trace(values)
    np.testing.assert_array_equal(grid8.boundary_block(trace, 0, 0), values[0])
    np.testing.assert_array_equal(grid8.boundary_block(trace, 1, 1), values[:, -1])


def test_spatial_field_is_frozen_and_finite(grid8: Grid) -> None:
    field = SpatialField.constant(grid8, 2.0, "phi")
    with pytest.raises(ValueError):
        field.values[0, 0] = 1.0
    with pytest.raises(ConfigError, match="not finite"):
        SpatialField(grid8, np.full(64, np.nan), "bad")
    with pytest.raises(ConfigError, match="must be positive"):
        SpatialField.constant(grid8, 0.0, "phi").require_positive("grid")


def test_boundary_field_time_interpolation(grid8: Grid) -> None:
    nf = grid8.boundary_face_count
    psi = BoundaryField(grid8, np.outer([0.0, 2.0], np.ones(nf)), (0.0, 1.0))
    assert psi.at(0.25)[0] == pytest.approx(0.5)
    assert psi.at(5.0)[0] == pytest.approx(2.0)
    np.testing.assert_allclose(psi.sample_times(0.5), [0.0, 0.5])
    with pytest.raises(ConfigError, match="increasing"):
        BoundaryField(grid8, np.zeros((2, nf)), (1.0, 0.0))


def test_time_series_rejects_unsorted_times() -> None:
    assert len(TimeSeries.from_lists([0.0, 1.0], [1.0, 2.0])) == 2
    with pytest.raises(ConfigError):
        TimeSeries.from_lists([0.0, 0.0], [1.0, 2.0])
