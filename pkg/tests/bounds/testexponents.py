import math

import pytest

from forchbound.bounds.exponents import (
    build_exponents,
    choose_p,
    default_r,
    default_r1,
    r1_interval,
)
from forchbound.models.base import AdmissibilityError


def test_gas_exponents_at_alpha_40() -> None:
    book = build_exponents(2, 0.5, 0.5, 2.0 / 3.0, 1.0, 40.0, 1.03, alpha=40.0)
    assert book.r_star == pytest.approx(0.25)
    assert book.theta == pytest.approx(0.84)
    assert book.mu1 == pytest.approx(6.25)
    assert book.r_tilde == pytest.approx(3.0)
    assert book.theta_tilde == pytest.approx(0.92)
    assert book.mu1_tilde == pytest.approx(37.5)
    assert book.mu_max == pytest.approx(37.5)
    assert book.m == pytest.approx(40.0 / 1.5)
    assert (book.h1, book.h3) == (1.5, 0.0)
    assert book.kappa == pytest.approx(1.125)
    assert book.admissible


def test_alpha_defaults_to_beta1() -> None:
    book = build_exponents(3, 0.5, 0.5, 0.8, 1.0, 40.0, 1.03)
    assert book.alpha == book.beta1 == pytest.approx(41.2)
    assert book.beta(2) == pytest.approx(40.0 * 1.03**2)
    assert book.to_dict()["beta1"] == book.beta1


def test_windows_and_defaults() -> None:
    assert r1_interval(2, 0.5) == pytest.approx((2.0 / 3.0, 1.0))
    assert r1_interval(3, 0.2)[0] == pytest.approx(3.0 / 4.8)
    assert default_r1(2, 0.5) == pytest.approx(5.0 / 6.0)
    assert default_r(0.5, 0.5) == 1.0
    assert default_r(2.0, 0.1) == pytest.approx(2.0 * 2.8 - 1.0 + 0.1)


def test_default_p_choices_fit_under_kappa_tilde() -> None:
    for a in (0.1, 0.5, 0.9):
        pc = choose_p(a, 1.03)
        assert min(pc.p1, pc.p2, pc.p3, pc.p4, pc.p5, pc.p6) > 1.0
        assert max(pc.p1, pc.p2, pc.p3 * pc.p4, pc.p6) < 1.03
        assert set(pc.defaulted) == {"p1", "p2", "p3", "p4", "p5"}
    pc = choose_p(0.5, 1.03, {"p1": 1.01})
    assert pc.p1 == 1.01 and "p1" not in pc.defaulted
    assert pc.q[0] == pytest.approx(1.01 / 0.01)


def test_unknown_p_override() -> None:
    with pytest.raises(AdmissibilityError):
        choose_p(0.5, 1.03, {"p6": 1.01})


@pytest.mark.parametrize(
    "args, kwargs, condition",
    [
        ((4, 0.5, 0.5), {}, "n in {2, 3}"),
        ((2, 1.0, 0.5), {}, "0 < a < 1, lambda > 0"),
        ((3, 0.5, 0.5, 0.5), {}, "r1_range"),
        ((2, 0.5, 1.0, 2.0 / 3.0, 0.5), {}, "r_range"),
        ((2, 0.5, 0.5, 2.0 / 3.0, 1.0), {"alpha": 10.0}, "alpha_range"),
        ((2, 0.5, 0.5, 2.0 / 3.0, 1.0, 40.0, 1.1), {}, "kappa_tilde_window"),
        (
            (2, 0.5, 0.5, 2.0 / 3.0, 1.0, 40.0, 1.03),
            {"p_overrides": {"p1": 1.05}},
            "p_choices",
        ),
        (
            (2, 0.5, 0.5, 2.0 / 3.0, 1.0, 20.0, 1.03),
            {"alpha": 30.0},
            "alpha0_weighted",
        ),
    ],
)
def test_inadmissible_parameters(args: tuple, kwargs: dict, condition: str) -> None:
    with pytest.raises(AdmissibilityError) as info:
        build_exponents(*args, **kwargs)
    assert info.value.condition == condition


def test_conditions_are_recorded() -> None:
    book = build_exponents(2, 0.5, 0.5)
    assert list(book.flags) == [
        "r1_range",
        "r_range",
        "alpha_range",
        "kappa_tilde_window",
        "p_choices",
        "alpha0_ladder",
        "alpha0_weighted",
    ]
    floor = float(book.conditions["alpha0_weighted"].rsplit(" ", 1)[-1])
    assert floor == pytest.approx(6.0 / (1.03 * book.r_star))
    assert math.isclose(book.p_degree, 1.5)
