import math

import numpy as np
import pytest

from forchbound.bounds.exponents import ExponentBook, build_exponents
from forchbound.bounds.integrals import (
    boundary_time_integral,
    compute_data_integrals,
    m_series,
    u0_integrals,
)
from forchbound.core.grid import BoundaryField, Grid, SpatialField
from forchbound.models.base import ConstitutiveError
from forchbound.models.forchheimer import ForchheimerLaw
from forchbound.models.weights import compute_weights


@pytest.fixture
def book40() -> ExponentBook:
    return build_exponents(2, 0.5, 0.5, 2.0 / 3.0, 1.0, 40.0, 1.03, alpha=40.0)


def integrals_for(book: ExponentBook, law: ForchheimerLaw, psi: float, T: float = 1.0):
    grid = law.grid
    return compute_data_integrals(
        book,
        SpatialField.constant(grid, 1.0),
        compute_weights(law),
        law.coefficients[-1],
        BoundaryField.constant(grid, psi),
        T,
    )


def test_ideal_law_integrals(book40: ExponentBook, ideal_law: ForchheimerLaw) -> None:
    di = integrals_for(book40, ideal_law, 0.0)
    assert di.K1.value == pytest.approx(1.0)
    assert di.K4.value == pytest.approx(4.0)
    assert di.K5.log == pytest.approx(41.0 * math.log(0.5 + math.sqrt(2.0)))
    assert di.Phi_star.value == pytest.approx(2.0)
    assert di.Psi_T.value == 1.0
    np.testing.assert_array_equal(di.M.values, [1.0, 1.0])
    assert di.warnings == ()
    assert di.N3.log == max(di.N1.log, di.N2.log)


def test_inflow_enters_m_and_psi(
    book40: ExponentBook, ideal_law: ForchheimerLaw
) -> None:
    di = integrals_for(book40, ideal_law, -0.5, T=2.0)
    # surface 4, exponent (alpha + r)/r = 41
    np.testing.assert_allclose(di.M.values, 1.0 + 4.0 * 0.5**41, rtol=1e-12)
    assert di.Psi_T.value > 1.0
    assert list(di.M.times) == [0.0, 2.0]


def test_time_sampled_boundary_data(grid8: Grid) -> None:
    nf = grid8.boundary_face_count
    psi = BoundaryField(grid8, np.outer([0.0, -1.0], np.ones(nf)), (0.0, 1.0))
    m = m_series(psi, 2.0, 1.0, 0.5)
    assert list(m.times) == [0.0, 0.5]
    assert m.values[1] == pytest.approx(1.0 + 4.0 * 0.5**3)
    # int_G (psi^-)^2 is 0 at t = 0 and 1 at t = 0.5
    assert boundary_time_integral(psi, 2.0, 0.5) == pytest.approx(0.25)


def test_u0_integrals(grid8: Grid) -> None:
    u0 = SpatialField.constant(grid8, 2.0)
    phi = SpatialField.constant(grid8, 3.0)
    V0, norm = u0_integrals(u0, phi, 4.0)
    assert V0.value == pytest.approx(1.0 + 48.0)
    assert norm.value == pytest.approx(48.0**0.25)


def test_mismatched_requests(book40: ExponentBook, ideal_law: ForchheimerLaw) -> None:
    grid = ideal_law.grid
    args = (
        SpatialField.constant(grid, 1.0),
        compute_weights(ideal_law),
        ideal_law.coefficients[-1],
        BoundaryField.constant(grid, 0.0),
    )
    with pytest.raises(ConstitutiveError):
        compute_data_integrals(book40, *args, 1.0, alpha=41.0)
    with pytest.raises(ConstitutiveError):
        compute_data_integrals(book40, *args, 0.0)
