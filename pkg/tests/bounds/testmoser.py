import math

import pytest

from forchbound.bounds.exponents import ExponentBook, build_exponents
from forchbound.bounds.moser import direct_nu_product, moser_products


def test_products_approach_one_for_huge_alpha0() -> None:
    book = moser_products(build_exponents(2, 0.5, 0.5, 2.0 / 3.0, 1.0, 1e9, 1.03))
    mp = book.moser
    assert mp is not None
    assert mp.mu_tilde == pytest.approx(1.0, abs=1e-6)
    assert mp.nu_tilde == pytest.approx(1.0, abs=1e-6)
    assert mp.mu_tilde < 1.0 < mp.nu_tilde


def test_gas_products(gas_book: ExponentBook) -> None:
    mp = gas_book.moser
    assert mp is not None
    assert mp.nu_tilde <= mp.nu_rigorous_bound
    assert mp.nu_nominal_bound <= mp.nu_rigorous_bound
    assert mp.weight_sum == pytest.approx(1.0 / (40.0 * (1.0 - 1.0 / 1.03) ** 2))
    assert mp.omega == pytest.approx(mp.G * mp.weight_sum)
    rs = gas_book.r_star
    assert mp.omega1 == pytest.approx((2.0 + rs / 2.0) * mp.omega)
    assert mp.omega3 - mp.omega1 == pytest.approx(mp.omega)
    assert mp.tail_mu < 1e-12 and mp.tail_nu < 1e-12


def test_log_space_matches_a_running_product(gas_book: ExponentBook) -> None:
    mp = gas_book.moser
    assert mp is not None
    direct = direct_nu_product(gas_book, mp.terms_nu)
    assert math.log(direct) == pytest.approx(math.log(mp.nu_tilde), rel=1e-10)


def test_truncation_controls(gas_book: ExponentBook) -> None:
    short = moser_products(gas_book, max_terms=10).moser
    assert short is not None
    assert short.terms_nu == short.terms_mu == 10
    assert short.tail_nu > 0
    loose = moser_products(gas_book, truncation_tol=1e-4).moser
    assert loose is not None and gas_book.moser is not None
    assert loose.terms_nu < gas_book.moser.terms_nu


def test_env_caps_terms(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("FORCHBOUND_PRODUCT_MAX_TERMS", "7")
    book = moser_products(build_exponents(3, 0.5, 0.5, 0.8, 1.0, 40.0, 1.03))
    assert book.moser is not None and book.moser.terms_mu == 7


@pytest.mark.parametrize(
    "n, r1",
    [(3, 0.8), (2, 2.0 / 3.0)],
)
def test_products_are_stable_under_a_tighter_truncation(n: int, r1: float) -> None:
    book = build_exponents(n, 0.5, 0.5, r1, 1.0, 40.0, 1.03)
    coarse = moser_products(book, truncation_tol=1e-14).moser
    fine = moser_products(book, truncation_tol=1e-16).moser
    assert coarse is not None and fine is not None
    assert fine.terms_nu > coarse.terms_nu
    assert abs(fine.mu_tilde - coarse.mu_tilde) < 1e-12
    assert abs(fine.nu_tilde - coarse.nu_tilde) < 1e-12
