import math

import numpy as np
import pytest

from forchbound.core.grid import Grid, SpatialField
from forchbound.core.quadrature import (
    boundary_normal_flux,
    discrete_divergence,
    discrete_gradient,
    grad_energy,
    integrate_boundary,
    integrate_volume,
    power_integral,
    weighted_lp_norm,
)
from forchbound.models.base import QuadratureError


def test_midpoint_rule_is_exact_for_linear_integrands(grid8: Grid) -> None:
    assert integrate_volume(grid8, lambda x, y: 2.0 * x + y) == pytest.approx(1.5)
    assert integrate_boundary(grid8, 1.0) == pytest.approx(4.0)


def test_non_finite_integrand_names_the_cell(grid8: Grid) -> None:
    values = np.ones((8, 8))
    values[3, 5] = np.inf
    with pytest.raises(QuadratureError) as excinfo:
        integrate_volume(grid8, values)
    assert excinfo.value.cell == (3, 5)
    assert excinfo.value.exit_code == 2


def test_weighted_lp_norm(grid8: Grid) -> None:
    u = SpatialField.constant(grid8, 2.0)
    phi = SpatialField.constant(grid8, 0.25)
    assert weighted_lp_norm(u, phi, 2.0) == pytest.approx(1.0)


def test_power_integral_in_log_space(grid8: Grid) -> None:
    huge = np.full(64, 1e200)
    result = power_integral(grid8, [(huge, 3.0), (np.full(64, 2.0), 1.0)], "big")
    assert result.value.log == pytest.approx(600.0 * math.log(10.0) + math.log(2.0))
    assert not result.possibly_divergent


def test_power_integral_flags_vanishing_weight(grid8: Grid) -> None:
    base = np.ones(64)
    base[0] = 0.0
    result = power_integral(grid8, [(base, -1.0)], "inverse")
    assert result.possibly_divergent
    assert result.value.value > 1e200


def test_power_integral_rejects_negative_base(grid8: Grid) -> None:
    with pytest.raises(QuadratureError):
        power_integral(grid8, [(-np.ones(64), 2.0)], "negative")


def test_gradient_of_a_linear_field(grid8: Grid) -> None:
    u = SpatialField.from_function(grid8, lambda x, y: 3.0 * x + 2.0 * y)
    gradient = discrete_gradient(grid8, u)
    np.testing.assert_allclose(gradient.normal(0), 3.0)
    np.testing.assert_allclose(gradient.magnitude(1), math.sqrt(13.0))
    assert grad_energy(u, 1.0, 2.0, 2.0, 2.0) == pytest.approx(13.0)


def test_discrete_divergence_theorem(grid8: Grid) -> None:
    rng = np.random.default_rng(0)
    fluxes = [rng.normal(size=grid8.face_shape(k)) for k in range(2)]
    total = integrate_volume(grid8, discrete_divergence(grid8, fluxes))
    boundary = float(
        np.sum(boundary_normal_flux(grid8, fluxes) * grid8.boundary_face_areas())
    )
    assert total == pytest.approx(boundary, abs=1e-12)
