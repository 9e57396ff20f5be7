from dataclasses import dataclass, replace
from typing import Callable, Iterator

import pytest

from forchbound.bounds.constants import ProofConstants, compute_Zstar
from forchbound.bounds.curves import BoundReport, alpha_bound_curve
from forchbound.bounds.exponents import ExponentBook, build_exponents
from forchbound.bounds.integrals import (
    DataIntegrals,
    compute_data_integrals,
    u0_integrals,
)
from forchbound.bounds.moser import moser_products
from forchbound.config import get_settings
from forchbound.core.grid import BoundaryField, Grid, SpatialField
from forchbound.core.lognum import LogNumber
from forchbound.harness.calibrate import EmbeddingConstants
from forchbound.models.forchheimer import ForchheimerLaw
from forchbound.models.weights import compute_weights
from forchbound.solver.scenario import Scenario


@pytest.fixture(autouse=True)
def fresh_settings() -> Iterator[None]:
    # settings are cached; env overrides set by a test must not leak
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def grid8() -> Grid:
    return Grid.unit(2, 8)


@pytest.fixture
def grid16() -> Grid:
    return Grid.unit(2, 16)


@pytest.fixture
def ideal_law(grid8: Grid) -> ForchheimerLaw:
    """g = 1 + s, so a = 1/2, W1 = 1/2 and W2 = 1."""
    return ForchheimerLaw(
        (0.0, 1.0),
        (SpatialField.constant(grid8, 1.0), SpatialField.constant(grid8, 1.0)),
        "two_term",
    )


@pytest.fixture
def gas_book() -> ExponentBook:
    """n = 3, a = lambda = 1/2, r1 = 0.8, r = 1, alpha0 = 40, kappa~ = 1.03."""
    return moser_products(build_exponents(3, 0.5, 0.5, 0.8, 1.0, 40.0, 1.03))


@dataclass(frozen=True)
class BoundChain:
    """Ideal law on the unit square with Z* pinned to 80."""

    scenario: Scenario
    book: ExponentBook
    integrals: DataIntegrals
    proof: ProofConstants
    report: BoundReport
    consts: EmbeddingConstants
    u0_norm: float


def build_chain(u0: float = 1.0, psi: float = 0.0) -> BoundChain:
    grid = Grid.unit(2, 8)
    law = ForchheimerLaw(
        (0.0, 1.0),
        (SpatialField.constant(grid, 1.0), SpatialField.constant(grid, 1.0)),
        "two_term",
    )
    phi = SpatialField.constant(grid, 1.0)
    scenario = Scenario(
        grid,
        law,
        phi,
        0.5,
        BoundaryField.constant(grid, psi),
        SpatialField.constant(grid, u0),
        1.0,
    )
    book = moser_products(build_exponents(2, 0.5, 0.5, 2.0 / 3.0, 1.0, 40.0, 1.03))
    consts = EmbeddingConstants(2.0, 2.0, 2.0, 2.0, 2.0, 2.0, 2.0)
    integrals = compute_data_integrals(
        book, phi, compute_weights(law), law.coefficients[-1], scenario.psi, 1.0
    )
    proof = compute_Zstar(book, integrals, 0.0, consts)
    proof = replace(proof, values={**proof.values, "Zstar": LogNumber.from_value(80)})
    V0, norm = u0_integrals(scenario.u0, phi, book.alpha)
    report = alpha_bound_curve(book, proof, V0, integrals.M, 1.0)
    return BoundChain(scenario, book, integrals, proof, report, consts, norm.value)


@pytest.fixture
def chain() -> BoundChain:
    return build_chain()


@pytest.fixture
def make_chain() -> Callable[..., BoundChain]:
    return build_chain
