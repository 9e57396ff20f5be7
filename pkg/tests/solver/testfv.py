import numpy as np
import pytest

from forchbound.core.grid import BoundaryField, Grid, SpatialField
from forchbound.core.quadrature import discrete_gradient
from forchbound.models.base import ConvergenceError, SolverError
from forchbound.models.forchheimer import ForchheimerLaw, LawSites
from forchbound.solver.fv import face_fluxes, solve, step, u_of_w
from forchbound.solver.scenario import Scenario
from forchbound.types.runconfig import SolverConfig

CONFIG = SolverConfig(dt_initial=1e-4, dt_max=1e-3, output_every=5, alpha_list=[2.0])


def bump_scenario(
    grid: Grid, law: ForchheimerLaw, psi: float = 0.0, cz: float = 0.0
) -> Scenario:
    u0 = SpatialField.from_function(
        grid, lambda x, y: 1.0 + 0.5 * np.exp(-((x - 0.4) ** 2 + (y - 0.5) ** 2) / 0.02)
    )
    return Scenario(
        grid,
        law,
        SpatialField.constant(grid, 1.0),
        0.5,
        BoundaryField.constant(grid, psi),
        u0,
        0.005,
        cz,
    )


def test_constant_state_is_steady(grid8: Grid, ideal_law: ForchheimerLaw) -> None:
    sc = Scenario(
        grid8,
        ideal_law,
        SpatialField.constant(grid8, 2.0),
        0.5,
        BoundaryField.constant(grid8, 0.0),
        SpatialField.constant(grid8, 3.0),
        0.002,
    )
    trace = solve(sc, CONFIG)
    np.testing.assert_allclose(trace.final.values, 3.0, rtol=1e-14)
    assert trace.snapshot_times[-1] == 0.002
    assert np.all(np.diff(trace.mass.times) > 0)


def test_no_flux_run_conserves_mass(grid8: Grid, ideal_law: ForchheimerLaw) -> None:
    trace = solve(bump_scenario(grid8, ideal_law), CONFIG)
    mass = trace.mass.values
    assert mass[-1] == pytest.approx(mass[0], rel=1e-10)
    energy = trace.energies[2.0].values
    assert np.all(np.diff(energy) <= 1e-10 * energy[:-1])
    # diffusion flattens the bump
    assert trace.final.max() < bump_scenario(grid8, ideal_law).u0.max()


def test_gravity_on_a_closed_box_conserves_mass(
    grid8: Grid, ideal_law: ForchheimerLaw
) -> None:
    trace = solve(bump_scenario(grid8, ideal_law, cz=0.5), CONFIG)
    assert trace.mass.values[-1] == pytest.approx(trace.mass.values[0], rel=1e-10)


def test_outflow_drains_mass(grid8: Grid, ideal_law: ForchheimerLaw) -> None:
    trace = solve(bump_scenario(grid8, ideal_law, psi=1.0), CONFIG)
    assert np.all(np.diff(trace.mass.values) < 0)
    assert np.all(trace.outflow.values > 0)
    assert trace.summary()["steps"] == len(trace.steps)


def test_snapshot_cadence(grid8: Grid, ideal_law: ForchheimerLaw) -> None:
    trace = solve(bump_scenario(grid8, ideal_law), CONFIG)
    assert trace.snapshot_times[0] == 0.0
    assert trace.snapshot_times[-1] == pytest.approx(0.005)
    assert len(trace.snapshots) == len(trace.snapshot_times)
    assert len(trace.snapshots) <= len(trace.steps) // 5 + 2


def test_boundary_fluxes_follow_the_robin_condition(
    grid8: Grid, ideal_law: ForchheimerLaw
) -> None:
    sc = bump_scenario(grid8, ideal_law, psi=2.0)
    w = sc.u0.values**0.5
    normal = face_fluxes(sc, w, 0.0).normal
    np.testing.assert_allclose(normal[0][0, :], 2.0 * w[0, :])
    np.testing.assert_allclose(normal[0][-1, :], -2.0 * w[-1, :])
    np.testing.assert_allclose(normal[1][:, 0], 2.0 * w[:, 0])
    np.testing.assert_allclose(normal[1][:, -1], -2.0 * w[:, -1])


def test_boundary_flux_uses_the_adjacent_cell_value() -> None:
    grid = Grid.unit(1, 4)
    law = ForchheimerLaw(
        (0.0, 1.0),
        (SpatialField.constant(grid, 1.0), SpatialField.constant(grid, 1.0)),
    )
    sc = Scenario(
        grid,
        law,
        SpatialField.constant(grid, 1.0),
        0.5,
        BoundaryField.constant(grid, 1.0),
        SpatialField(grid, np.array([1.0, 9.0, 9.0, 1.0])),
        0.01,
    )
    normal = face_fluxes(sc, sc.u0.values**0.5, 0.0).normal[0]
    # an extrapolated trace would give max(1.5 - 1.5, 0) = 0 here
    assert normal[0] == pytest.approx(1.0)
    assert normal[-1] == pytest.approx(-1.0)
    # g = 1 + s at |grad u| = 32 gives s = (sqrt(129) - 1) / 2
    s = (np.sqrt(129.0) - 1.0) / 2.0
    np.testing.assert_allclose(normal[1:-1], [32.0 / (1 + s), 0.0, -32.0 / (1 + s)])


def test_law_is_evaluated_on_interior_faces_only(
    grid8: Grid, ideal_law: ForchheimerLaw, monkeypatch: pytest.MonkeyPatch
) -> None:
    sc = bump_scenario(grid8, ideal_law, psi=1.0)
    w = sc.u0.values**0.5
    g = discrete_gradient(grid8, u_of_w(w, 0.5)).components[0]
    full = ideal_law.face_sites(0).x_values(g.reshape(2, -1))[0]
    full = full.reshape(grid8.face_shape(0))
    sizes = []
    x_values = LawSites.x_values

    def counting(self: LawSites, y: np.ndarray, tol: object = None) -> np.ndarray:
        sizes.append(y.shape[1])
        return x_values(self, y, tol)

    monkeypatch.setattr(LawSites, "x_values", counting)
    normal = face_fluxes(sc, w, 0.0).normal
    assert sizes == [7 * 8, 7 * 8]
    np.testing.assert_allclose(normal[0][1:-1, :], full[1:-1, :], atol=1e-13)


def test_constant_state_does_not_drift_over_many_steps(
    grid8: Grid, ideal_law: ForchheimerLaw
) -> None:
    sc = Scenario(
        grid8,
        ideal_law,
        SpatialField.constant(grid8, 1.0),
        0.5,
        BoundaryField.constant(grid8, 0.0),
        SpatialField.constant(grid8, 4.0),
        0.1,
    )
    state = SpatialField.constant(grid8, 2.0)
    t = 0.0
    for _ in range(100):
        result = step(state, t, 1e-4, sc, CONFIG)
        assert result.converged
        state = SpatialField(grid8, result.w)
        t = result.record.t
    assert np.max(np.abs(state.values - 2.0)) <= 1e-12
    assert t == pytest.approx(0.01)


def test_step_accepts_dt_below_dt_min(grid8: Grid, ideal_law: ForchheimerLaw) -> None:
    config = SolverConfig(dt_initial=1e-4, dt_min=1e-4, dt_max=1e-3)
    sc = bump_scenario(grid8, ideal_law)
    state = SpatialField(grid8, sc.u0.values**0.5)
    result = step(state, 0.0, 1e-6, sc, config)
    assert result.converged
    assert result.record.dt == 1e-6


def test_step_guards(grid8: Grid, ideal_law: ForchheimerLaw) -> None:
    sc = bump_scenario(grid8, ideal_law)
    with pytest.raises(SolverError):
        step(SpatialField.constant(grid8, -1.0), 0.0, 1e-4, sc, CONFIG)
    with pytest.raises(SolverError):
        step(SpatialField.constant(grid8, 1.0), 0.0, 1.0, sc, CONFIG)


def test_picard_failure_below_dt_min_raises(
    grid8: Grid, ideal_law: ForchheimerLaw
) -> None:
    config = SolverConfig(
        dt_initial=1e-3, dt_min=1e-4, dt_max=1e-2, picard_max=1, picard_tol=1e-14
    )
    with pytest.raises(ConvergenceError, match="dt_min"):
        solve(bump_scenario(grid8, ideal_law), config)
