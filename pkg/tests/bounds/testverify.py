import pytest

from forchbound.bounds.linfty import linfty_bound
from forchbound.bounds.verify import (
    MARGIN_COLUMNS,
    SABOTAGE_DIVISOR,
    verify_solution_against_bounds,
)
from forchbound.models.base import VerificationError
from forchbound.solver.fv import solve
from forchbound.types.runconfig import SolverConfig

CONFIG = SolverConfig(dt_initial=1e-4, dt_max=1e-4, output_every=1)


def checked(make_chain, u0: float, sabotage=None):
    chain = make_chain(u0=u0)
    T = 0.5 * chain.report.T_threshold
    report = linfty_bound(
        chain.book,
        chain.integrals,
        chain.proof,
        chain.report,
        T,
        0.1 * T,
        chain.u0_norm,
    )
    trace = solve(chain.scenario.with_horizon(T), CONFIG)
    return verify_solution_against_bounds(trace, report, chain.book, sabotage)


def test_zero_solution_passes(make_chain) -> None:
    margin = checked(make_chain, 0.0)
    assert margin.passed
    assert {r.check for r in margin.rows} == {"L_beta1", "L_inf"}
    assert margin.worst_ratio == 1e300


def test_constant_solution_passes_with_room(make_chain) -> None:
    margin = checked(make_chain, 1.0)
    assert margin.passed
    assert margin.worst_ratio > 1.0
    assert len(margin.rows[0].as_row()) == len(MARGIN_COLUMNS)
    assert margin.to_dict()["failures"] == 0


def test_sabotaged_bounds_fail(make_chain) -> None:
    margin = checked(make_chain, 1.0, SABOTAGE_DIVISOR)
    assert not margin.passed
    assert margin.sabotaged
    assert all(r.check == "L_beta1" for r in margin.failures)
    assert "embedding constants" in margin.to_dict()["audit"]


def test_horizon_mismatch(chain) -> None:
    T = 0.5 * chain.report.T_threshold
    report = linfty_bound(
        chain.book, chain.integrals, chain.proof, chain.report, T, 0.1 * T, 1.0
    )
    trace = solve(chain.scenario.with_horizon(2.0 * T), CONFIG)
    with pytest.raises(VerificationError, match="horizon"):
        verify_solution_against_bounds(trace, report, chain.book)
