import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from forchbound.bounds.exponents import ExponentBook
from forchbound.bounds.genn import genn_bound, moser_genn_check
from forchbound.core.lognum import LogNumber
from forchbound.models.base import AdmissibilityError


def ladder(kt: float, beta0: float):
    def kappa(j: int) -> float:
        return beta0 * kt**j

    return dict(
        kappa=kappa,
        r=lambda j: kappa(j) - 1.0,
        s=lambda j: kappa(j) + 1.0,
        omega=lambda j: float(j + 1),
    )


def test_linear_recursion_closed_form() -> None:
    # k = 2^(j+1), r = s = k, w = 1: y_{j+1} = (2A)^(1/k) y_j
    result = genn_bound(
        4.0,
        3.0,
        kappa=lambda j: 2.0 ** (j + 1),
        r=lambda j: 2.0 ** (j + 1),
        s=lambda j: 2.0 ** (j + 1),
        omega=lambda j: 1.0,
        horizon=40,
    )
    assert result.log_bound == pytest.approx(math.log(24.0))
    assert result.beta_bar == result.gamma_bar == 1.0
    assert result.G == 1.0
    assert result.verified
    assert result.terms > 1


def test_zero_start() -> None:
    result = genn_bound(2.0, 0.0, **ladder(1.5, 10.0), horizon=30)
    assert result.log_bound == -math.inf
    assert result.verified


@settings(max_examples=25, deadline=None)
@given(
    kt=st.floats(1.2, 2.0),
    beta0=st.floats(5.0, 50.0),
    A=st.floats(1.0, 100.0),
    y0=st.floats(0.1, 10.0),
)
def test_iteration_never_exceeds_the_bound(
    kt: float, beta0: float, A: float, y0: float
) -> None:
    result = genn_bound(A, y0, **ladder(kt, beta0), horizon=200)
    assert result.verified


@pytest.mark.parametrize(
    "A, y0, seqs",
    [
        (0.5, 1.0, ladder(1.5, 10.0)),
        (2.0, -1.0, ladder(1.5, 10.0)),
        (2.0, 1.0, {**ladder(1.5, 10.0), "s": lambda j: 1.0}),
        (
            2.0,
            1.0,
            {**ladder(1.5, 10.0), "kappa": lambda j: 1.0, "r": lambda j: 1.0},
        ),
    ],
)
def test_inadmissible_sequences(A: float, y0: float, seqs: dict) -> None:
    with pytest.raises(AdmissibilityError):
        genn_bound(A, y0, **seqs, horizon=5, max_terms=2000)


def test_moser_ladder_agrees_with_its_closed_form(gas_book: ExponentBook) -> None:
    check = moser_genn_check(gas_book, LogNumber.from_value(10.0), 2.0)
    assert check.agrees
    assert check.genn.verified
    assert check.to_dict()["agrees"] is True
