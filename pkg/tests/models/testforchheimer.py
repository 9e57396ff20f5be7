import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from forchbound.core.grid import Grid, SpatialField
from forchbound.models.base import ConfigError, ConstitutiveError
from forchbound.models.forchheimer import (
    ForchheimerLaw,
    eval_g,
    eval_K,
    eval_X,
    lambda_from_gamma,
    law_summary,
    preset_law,
    solve_s,
)


def test_two_term_closed_form(ideal_law: ForchheimerLaw) -> None:
    assert ideal_law.degeneracy == pytest.approx(0.5)
    assert solve_s(ideal_law, (0, 0), 2.0) == pytest.approx(1.0, rel=1e-15)
    assert eval_K(ideal_law, 5, 2.0) == pytest.approx(0.5)
    assert solve_s(ideal_law, 0, 0.0) == 0.0
    # tiny xi: s ~ xi without cancellation
    assert solve_s(ideal_law, 0, 1e-300) == pytest.approx(1e-300, rel=1e-12)


def test_three_term_newton(grid8: Grid) -> None:
    law = preset_law("three_term", {"a": 1.0, "b": 1.0, "c": 1.0}, grid8)
    assert law.degeneracy == pytest.approx(2.0 / 3.0)
    assert solve_s(law, 0, 3.0) == pytest.approx(1.0, rel=1e-13)
    assert eval_g(law, 0, 1.0) == pytest.approx(3.0)
    np.testing.assert_allclose(eval_X(law, 0, [3.0, 0.0]), [1.0, 0.0], rtol=1e-13)


@settings(max_examples=50, deadline=None)
@given(xi=st.floats(min_value=0.0, max_value=1e8, allow_nan=False))
def test_s_inverts_s_times_g(xi: float) -> None:
    grid = Grid.unit(1, 2)
    law = preset_law("power_law", {"a": 2.0, "b": 0.5, "m": 1.5}, grid)
    s = solve_s(law, 0, xi)
    assert s >= 0.0
    assert s * eval_g(law, 0, s) == pytest.approx(xi, rel=1e-12, abs=1e-14)


def test_k_is_non_increasing(ideal_law: ForchheimerLaw) -> None:
    xi = np.linspace(0.0, 50.0, 201)
    k = ideal_law.cell_site(0).k_values(xi)
    assert np.all(np.diff(k) <= 0.0)
    assert k[0] == pytest.approx(1.0)


def test_heterogeneous_coefficients(grid8: Grid) -> None:
    law = preset_law("two_term", {"a": "preset:linear_x", "b": 2.0}, grid8)
    summary = law_summary(law)
    assert summary["exponents"] == [0.0, 1.0]
    lo, hi = summary["coefficient_ranges"][0]
    assert lo == pytest.approx(1.0 / 16.0)
    assert hi == pytest.approx(15.0 / 16.0)


@pytest.mark.parametrize(
    "exponents, values",
    [
        ((0.0,), (1.0,)),
        ((0.5, 1.0), (1.0, 1.0)),
        ((0.0, 1.0, 1.0), (1.0, 1.0, 1.0)),
        ((0.0, 1.0), (1.0, 0.0)),
        ((0.0, 1.0, 2.0), (1.0, -1.0, 1.0)),
    ],
)
def test_invalid_laws(grid8: Grid, exponents: tuple, values: tuple) -> None:
    fields = tuple(SpatialField.constant(grid8, v) for v in values)
    with pytest.raises(ConstitutiveError):
        ForchheimerLaw(exponents, fields)


def test_preset_errors(grid8: Grid) -> None:
    with pytest.raises(ConfigError, match="unknown law preset"):
        preset_law("cubic", {}, grid8)
    with pytest.raises(ConfigError, match="m in"):
        preset_law("power_law", {"a": 1.0, "b": 1.0, "m": 2.5}, grid8)
    with pytest.raises(ConfigError, match="missing"):
        preset_law("three_term", {"a": 1.0, "b": 1.0}, grid8)


def test_negative_xi_rejected(ideal_law: ForchheimerLaw) -> None:
    with pytest.raises(ConstitutiveError):
        solve_s(ideal_law, 0, -1.0)
    with pytest.raises(ConstitutiveError):
        eval_g(ideal_law, 0, -1.0)


def test_gamma_to_lambda() -> None:
    assert lambda_from_gamma(1.0) == pytest.approx(0.5)
    with pytest.raises(ConfigError):
        lambda_from_gamma(0.5)
