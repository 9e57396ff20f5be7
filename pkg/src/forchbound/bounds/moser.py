"""Convergent products and sums along the ladder beta_j = kappa_tilde^j alpha0."""

import math
from typing import Callable, Optional, Tuple

from ..config import get_settings
from ..core.log import get_logger
from ..models.base import AdmissibilityError, Component
from .exponents import ExponentBook, MoserProducts

logger = get_logger(__name__)

_BOUNDS = Component.BOUNDS.value


def _log_r_factor(book: ExponentBook, beta: float) -> float:
    """log(r~_j / beta_j) = log(1 - h1/beta) - log(1 + 1/(beta(1 + r*/2)))."""
    x = book.h1 / beta
    if x >= 1.0:
        raise AdmissibilityError(
            f"Moser factor r~/beta <= 0 at beta={beta:.17g} (h1={book.h1:g})",
            _BOUNDS,
            "alpha0_ladder",
        )
    return math.log1p(-x) - math.log1p(1.0 / (beta * (1.0 + book.r_star / 2.0)))


def _log_s_factor(book: ExponentBook, beta: float) -> float:
    """log(s~_j / beta_j) = log(1 + h3/beta) - log(1 - lambda/(beta(1 + r*/2)))."""
    x = book.lam / (beta * (1.0 + book.r_star / 2.0))
    if x >= 1.0:
        raise AdmissibilityError(
            f"Moser factor s~/beta <= 0 at beta={beta:.17g}",
            _BOUNDS,
            "alpha0_ladder",
        )
    return math.log1p(book.h3 / beta) - math.log1p(-x)


def _log_product(
    book: ExponentBook,
    log_factor: Callable[[ExponentBook, float], float],
    tol: float,
    max_terms: int,
    start: int = 0,
) -> Tuple[float, int, float]:
    """(sum of log factors, terms used, bound on the dropped tail)."""
    total = 0.0
    last = 0.0
    j = start
    while j < max_terms:
        term = log_factor(book, book.beta(j))
        total += term
        last = term
        j += 1
        if abs(math.expm1(term)) < tol:
            break
    # the dropped factors shrink geometrically with ratio 1/kappa_tilde
    tail = abs(last) / (book.kappa_tilde - 1.0)
    return total, j - start, tail


def moser_products(
    book: ExponentBook,
    truncation_tol: Optional[float] = None,
    max_terms: Optional[int] = None,
) -> ExponentBook:
    """mu~, nu~, G, omega and omega1..3; the book comes back with them attached.

    Products are summed in log space and stop once |factor - 1| drops below
    ``truncation_tol`` or after ``max_terms`` factors.
    """
    settings = get_settings()
    tol = settings.product_truncation if truncation_tol is None else truncation_tol
    limit = settings.product_max_terms if max_terms is None else max_terms
    kt, a0, rs = book.kappa_tilde, book.alpha0, book.r_star

    log_mu, n_mu, tail_mu = _log_product(book, _log_r_factor, tol, limit)
    log_nu, n_nu, tail_nu = _log_product(book, _log_s_factor, tol, limit)
    mu_t = math.exp(log_mu)
    nu_t = math.exp(log_nu)
    G = math.exp(log_nu - _log_s_factor(book, book.beta(0)))
    weight_sum = 1.0 / (a0 * (1.0 - 1.0 / kt) ** 2)
    omega = G * weight_sum

    x0 = book.lam / (a0 * (1.0 + rs / 2.0))
    geometric = 1.0 / (1.0 - 1.0 / kt)
    nominal = math.exp((x0 + book.h3 / a0) * geometric)
    rigorous = math.exp((x0 / (1.0 - x0) + book.h3 / a0) * geometric)

    products = MoserProducts(
        mu_tilde=mu_t,
        nu_tilde=nu_t,
        G=G,
        weight_sum=weight_sum,
        omega=omega,
        omega1=(2.0 + rs / 2.0) * omega,
        omega2=(1.0 + rs / 2.0) * omega,
        omega3=(3.0 + rs / 2.0) * omega,
        terms_mu=n_mu,
        terms_nu=n_nu,
        tail_mu=tail_mu,
        tail_nu=tail_nu,
        nu_nominal_bound=nominal,
        nu_rigorous_bound=rigorous,
    )
    if n_nu >= limit or n_mu >= limit:
        logger.warning(
            "Moser products hit the %d-term cap (tails %.3e, %.3e)",
            limit,
            tail_mu,
            tail_nu,
        )
    logger.debug(
        "Moser products: mu~=%.17g (%d terms) nu~=%.17g (%d terms) omega=%.6g",
        mu_t,
        n_mu,
        nu_t,
        n_nu,
        omega,
    )
    return book.with_moser(products)


def direct_nu_product(book: ExponentBook, terms: int) -> float:
    """Plain running product of s~_j / beta_j for j < terms."""
    out = 1.0
    for j in range(terms):
        out *= book.nu2(book.beta(j)) / book.beta(j)
    return out
