"""Ideal gas with the two-term law: a = lambda = 1/2 closed forms next to the
generic exponent pipeline."""

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from ..core.log import get_logger
from ..models.base import AdmissibilityError, Component, ConfigError
from .exponents import ExponentBook, build_exponents
from .moser import moser_products

logger = get_logger(__name__)

_BOUNDS = Component.BOUNDS.value

GAS_A = 0.5
GAS_LAMBDA = 0.5
AGREEMENT = 1e-12

DEFAULT_R1 = {2: 2.0 / 3.0, 3: 0.8}

# (r* offset, 2 + r* offset, 1 + r* offset) per dimension
_OFFSETS = {2: (1.75, 3.75, 2.75), 3: (1.5, 3.5, 2.5)}

COLUMNS = ("quantity", "closed_form", "generic", "abs_diff", "flagged")


@dataclass(frozen=True)
class GasRow:
    quantity: str
    closed_form: float
    generic: float
    abs_diff: float
    flagged: bool

    def as_row(self) -> Tuple[object, ...]:
        return (
            self.quantity,
            self.closed_form,
            self.generic,
            self.abs_diff,
            self.flagged,
        )


@dataclass(frozen=True)
class GasTable:
    n: int
    r1: float
    r: float
    alpha: float
    alpha0: float
    kappa_tilde: float
    rows: Tuple[GasRow, ...]
    book: ExponentBook

    @property
    def flagged(self) -> List[GasRow]:
        return [row for row in self.rows if row.flagged]

    def row(self, quantity: str) -> GasRow:
        for row in self.rows:
            if row.quantity == quantity:
                return row
        raise KeyError(quantity)

    def to_dict(self) -> Dict[str, object]:
        return {
            "n": self.n,
            "r1": self.r1,
            "r": self.r,
            "alpha": self.alpha,
            "alpha0": self.alpha0,
            "kappa_tilde": self.kappa_tilde,
            "rows": [dict(zip(COLUMNS, row.as_row())) for row in self.rows],
        }


def closed_forms(
    n: int, r1: float, r: float, alpha: float, alpha0: float, kappa_tilde: float
) -> Dict[str, float]:
    """Exponents of the ideal-gas case written out by hand."""
    rs_off, two_plus, one_plus = _OFFSETS[n]
    rs = rs_off - 1.0 / r1
    theta = (alpha + 2.0 * r) / (alpha * (1.0 + rs))
    theta_t = (alpha + 6.0 * r) / (alpha * (1.0 + rs))
    mu1_t = 3.0 * r * (1.0 + rs) * alpha / (rs * alpha - 6.0 * r)
    beta1 = kappa_tilde * alpha0
    return {
        "r_star": rs,
        "r_tilde": 3.0 * r,
        "theta": theta,
        "mu1": r / (1.0 - theta),
        "theta_tilde": theta_t,
        "mu1_tilde": mu1_t,
        "mu_max": mu1_t,
        "kappa": 1.0 + rs / 2.0,
        "h1": 1.5,
        "h3": 0.0,
        "kappa_tilde_max": math.sqrt((two_plus - 1.0 / r1) / 2.0),
        "alpha0_min": max(1.5, 6.0 * r / (kappa_tilde * rs)),
        "mu_max_beta1": 3.0
        * r
        * beta1
        * (one_plus - 1.0 / r1)
        / ((rs_off - 1.0 / r1) * beta1 - 6.0 * r),
        "nu_tilde_bound": math.exp(
            1.0 / (alpha0 * (two_plus - 1.0 / r1) * (1.0 - 1.0 / kappa_tilde))
        ),
    }


def _omega_closed(
    n: int, r1: float, alpha0: float, kappa_tilde: float, nu_tilde: float
) -> Dict[str, float]:
    _, two_plus, _ = _OFFSETS[n]
    base = nu_tilde / (alpha0 * (1.0 - 1.0 / kappa_tilde) ** 2)
    base *= 1.0 - 1.0 / (alpha0 * (two_plus - 1.0 / r1))
    # 2 + r*/2, 1 + r*/2, 3 + r*/2 written in r1
    rs_half = (_OFFSETS[n][0] - 1.0 / r1) / 2.0
    return {
        "omega1": base * (2.0 + rs_half),
        "omega2": base * (1.0 + rs_half),
        "omega3": base * (3.0 + rs_half),
    }


def _row(name: str, closed: float, generic: float) -> GasRow:
    diff = abs(closed - generic)
    flagged = diff > AGREEMENT * max(1.0, abs(closed))
    return GasRow(name, closed, generic, diff, flagged)


def example_gas_tables(
    n: int,
    r1: Optional[float] = None,
    alpha0: float = 40.0,
    r: float = 1.0,
    kappa_tilde: float = 1.03,
    alpha: Optional[float] = None,
    a: float = GAS_A,
    lam: float = GAS_LAMBDA,
) -> GasTable:
    if a != GAS_A or lam != GAS_LAMBDA:
        raise AdmissibilityError(
            f"gas tables need a = lambda = 1/2 (a={a}, lambda={lam})",
            _BOUNDS,
            "a = lambda = 1/2",
        )
    if n not in _OFFSETS:
        raise AdmissibilityError(
            f"gas tables need n in {{2, 3}}, got {n}", _BOUNDS, "n in {2, 3}"
        )
    r1 = DEFAULT_R1[n] if r1 is None else r1
    book = moser_products(
        build_exponents(n, a, lam, r1, r, alpha0, kappa_tilde, alpha=alpha)
    )
    mp = book.moser
    if mp is None:
        raise ConfigError("gas tables need the Moser products of the book", _BOUNDS)
    cf = closed_forms(n, r1, r, book.alpha, alpha0, kappa_tilde)
    generic_mu_beta1 = build_exponents(
        n, a, lam, r1, r, alpha0, kappa_tilde, alpha=book.beta1
    ).mu_max
    generic = {
        "r_star": book.r_star,
        "r_tilde": book.r_tilde,
        "theta": book.theta,
        "mu1": book.mu1,
        "theta_tilde": book.theta_tilde,
        "mu1_tilde": book.mu1_tilde,
        "mu_max": book.mu_max,
        "kappa": book.kappa,
        "h1": book.h1,
        "h3": book.h3,
        "kappa_tilde_max": math.sqrt(1.0 + book.r_star / 2.0),
        "alpha0_min": _generic_alpha0_floor(book),
        "mu_max_beta1": generic_mu_beta1,
    }
    rows = [_row(k, cf[k], generic[k]) for k in generic]
    omegas = _omega_closed(n, r1, alpha0, kappa_tilde, mp.nu_tilde)
    rows += [
        _row(k, omegas[k], getattr(mp, k)) for k in ("omega1", "omega2", "omega3")
    ]
    # nu~ is only bounded: the row is flagged when it exceeds the rigorous bound
    rows.append(
        GasRow(
            "nu_tilde_bound",
            cf["nu_tilde_bound"],
            mp.nu_tilde,
            max(0.0, mp.nu_tilde - cf["nu_tilde_bound"]),
            mp.nu_tilde > mp.nu_rigorous_bound,
        )
    )
    table = GasTable(n, r1, r, book.alpha, alpha0, kappa_tilde, tuple(rows), book)
    for row in table.flagged:
        logger.warning(
            "gas table %s: closed form %.17g vs generic %.17g",
            row.quantity,
            row.closed_form,
            row.generic,
        )
    return table


def _generic_alpha0_floor(book: ExponentBook) -> float:
    """Largest alpha0 lower bound among the ladder and weighted conditions."""
    return max(
        float(book.conditions[flag].rsplit(" ", 1)[-1])
        for flag in ("alpha0_ladder", "alpha0_weighted")
    )
