import math
from typing import Tuple

import pytest

from forchbound.bounds.pipeline import (
    BOUNDS_COLUMNS,
    embedding_source,
    run_bounds,
    search_grid,
)
from forchbound.models.base import ConfigError
from forchbound.solver.scenario import Scenario, build_scenario
from forchbound.types.runconfig import RunConfig, loads_config

BASE = """
[domain]
n = 2
cells = [8, 8]

[law]
preset = "two_term"

[scenario]
lambda = 0.5
psi = "constant:0.2"
u0 = "constant:1"
t_final = 1.0

[bounds]
alpha0 = 40.0
kappa_tilde = 1.03
horizon_fraction = 0.5
epsilon_fraction = 0.1
curve_points = 11
{extra}

[bounds.constants]
c1 = 2.0
c2 = 2.0
c3 = 2.0
c4 = 2.0
c5 = 2.0
c6 = 2.0
c7 = 2.0
"""


def setup(extra: str = "") -> Tuple[RunConfig, Scenario]:
    cfg = loads_config(BASE.format(extra=extra))
    return cfg, build_scenario(cfg)


def run(extra: str = "", cross_check: bool = False):
    cfg, scenario = setup(extra)
    source = embedding_source(cfg.bounds, cfg.harness, scenario.grid, 1.5)
    return run_bounds(scenario, cfg.bounds, source, cross_check)


def test_single_run_is_certified_and_recomputed() -> None:
    result = run()
    report = result.report
    assert result.certified
    assert report.T == pytest.approx(0.5 * report.T_threshold)
    assert report.epsilon == pytest.approx(0.1 * report.T)
    assert result.recompute["Zstar_rel_diff"] < 1e-12
    assert result.recompute["Linf_rel_diff"] < 1e-10
    rows = result.bounds_rows()
    assert len(rows) == 11 and len(rows[0]) == len(BOUNDS_COLUMNS)
    assert math.isnan(rows[0][-1])
    assert result.to_dict()["search"] == []


def test_alpha_off_the_ladder_has_no_linf_bound() -> None:
    result = run("alpha = 45.0")
    assert result.report.linf_bound is None
    assert any("no L^infinity bound" in note for note in result.report.notes)
    assert "Linf_rel_diff" not in result.recompute


def test_search_picks_the_smallest_certified_bound() -> None:
    cfg, scenario = setup("optimize = true")
    grid = search_grid(scenario, cfg.bounds)
    assert len(grid) == 25
    result = run("optimize = true")
    assert len(result.search) == len(grid)
    scored = [
        row for row in result.search if row.certified and row.log_linf is not None
    ]
    best = min(scored, key=lambda row: (row.log_linf, row.r1, row.r))
    assert (result.book.r1, result.book.r) == (best.r1, best.r)
    assert result.report.linf_bound is not None
    assert result.report.linf_bound.log == pytest.approx(best.log_linf)


def test_calibrated_constants_are_cached_per_r1() -> None:
    cfg = loads_config(
        """
        [domain]
        cells = [8, 8]
        [harness]
        count = 4
        max_frequency = 2
        safety_factor = 2.0
        """
    )
    scenario = build_scenario(cfg)
    source = embedding_source(cfg.bounds, cfg.harness, scenario.grid, 1.5)
    first = source(0.8)
    assert source(0.8) is first
    assert first.safety_factor == 2.0


def test_configured_constants_need_all_seven() -> None:
    cfg, scenario = setup()
    broken = cfg.bounds.model_copy(update={"constants": {"c1": 1.0}})
    with pytest.raises(ConfigError, match="missing"):
        embedding_source(broken, cfg.harness, scenario.grid, 1.5)
