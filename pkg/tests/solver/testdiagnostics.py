import numpy as np
import pytest

from forchbound.core.grid import BoundaryField, Grid, SpatialField
from forchbound.models.base import ConfigError
from forchbound.models.forchheimer import ForchheimerLaw
from forchbound.solver.diagnostics import (
    flux_antisymmetry_check,
    manufactured_order,
    manufactured_scenario,
    mass_balance_report,
    mms_exact,
    monotonicity_check,
)
from forchbound.solver.fv import solve
from forchbound.solver.scenario import Scenario
from forchbound.types.runconfig import SolverConfig

CONFIG = SolverConfig(dt_initial=1e-4, dt_max=1e-3, alpha_list=[1.5, 2.0, 4.0, 40.0])


def run(grid: Grid, law: ForchheimerLaw, psi: BoundaryField, cz: float = 0.0):
    u0 = SpatialField.from_function(
        grid, lambda x, y: 0.5 + np.exp(-((x - 0.3) ** 2 + (y - 0.6) ** 2) / 0.01)
    )
    phi = SpatialField.from_function(grid, lambda x, y: 1.0 + 0.5 * x)
    sc = Scenario(grid, law, phi, 0.5, psi, u0, 0.004, cz)
    return solve(sc, CONFIG)


def test_mass_identity_holds_every_step(grid8: Grid, ideal_law: ForchheimerLaw) -> None:
    nf = grid8.boundary_face_count
    psi = BoundaryField(grid8, np.outer([1.0, -0.5], np.ones(nf)), (0.0, 0.004))
    trace = run(grid8, ideal_law, psi)
    report = mass_balance_report(trace)
    assert report.passed
    assert len(report.rows) == len(trace.steps)
    assert report.clamped_mass == 0.0
    assert max(abs(r.defect) / r.scale for r in report.rows) <= 1e-10


def test_energies_decay_without_inflow(
    grid8: Grid, ideal_law: ForchheimerLaw
) -> None:
    trace = run(grid8, ideal_law, BoundaryField.constant(grid8, 0.3))
    for alpha in (1.5, 2.0, 4.0, 40.0, 3.0):
        report = monotonicity_check(trace, alpha)
        assert report.passed, alpha
        assert report.worst_increase <= 0


def test_monotonicity_needs_outflow_only(
    grid8: Grid, ideal_law: ForchheimerLaw
) -> None:
    trace = run(grid8, ideal_law, BoundaryField.constant(grid8, 0.0), cz=0.1)
    with pytest.raises(ConfigError):
        monotonicity_check(trace, 2.0)


@pytest.mark.parametrize("grid", [Grid.unit(1, 5), Grid.unit(2, 6), Grid.unit(3, 4)])
def test_flux_antisymmetry(grid: Grid) -> None:
    report = flux_antisymmetry_check(grid, seed=42)
    assert report.passed
    assert report.pair_errors == 0
    assert report.total_divergence == pytest.approx(report.boundary_flux, abs=1e-12)


def test_manufactured_solution_data() -> None:
    sc = manufactured_scenario(16)
    assert sc.n == 1
    np.testing.assert_allclose(mms_exact(np.array([0.0, 0.5, 1.0]), 2.0), [1, 1.5, 1])
    # psi(t) = s(t) / w*(h/2, t), and s(0) = 0
    assert sc.psi.at(0.0)[0] == 0.0
    assert sc.psi.at(sc.t_final)[0] > 0


def test_manufactured_order_is_at_least_one() -> None:
    report = manufactured_order((32, 128))
    assert report.errors[1] < report.errors[0]
    assert report.order >= 1.0
    assert report.to_dict()["resolutions"] == [32, 128]
    with pytest.raises(ConfigError):
        manufactured_order((64, 16))
