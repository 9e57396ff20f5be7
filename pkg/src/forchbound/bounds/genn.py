"""Upper bounds for sequences with
y_{j+1} <= A^{w_j/k_j} (y_j^{r_j} + y_j^{s_j})^{1/k_j}.

The bound is (2A)^{G abar} max{y0^bbar, y0^gbar} with abar = sum w_j/k_j,
bbar = prod r_j/k_j, gbar = prod s_j/k_j and G the largest product of
s_j/k_j over a window of consecutive indices j >= 1 (at least 1).
Everything is evaluated in log space and checked against direct iteration.
"""

import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple, Union

import numpy as np

from ..config import get_settings
from ..core.log import get_logger
from ..core.lognum import LogNumber
from ..models.base import AdmissibilityError, Component
from .exponents import ExponentBook

logger = get_logger(__name__)

_BOUNDS = Component.BOUNDS.value

Seq = Callable[[int], float]

SERIES_TOLERANCE = 1e-16
ITERATION_SLACK = 1e-9


@dataclass(frozen=True)
class GennResult:
    log_A: float
    y0: float
    alpha_bar: float
    beta_bar: float
    gamma_bar: float
    G: float
    terms: int
    log_bound: float
    horizon: int
    log_y_final: float
    log_y_max: float
    verified: bool

    @property
    def bound(self) -> LogNumber:
        return LogNumber(self.log_bound)

    def to_dict(self) -> dict:
        return {
            "log_A": self.log_A,
            "y0": self.y0,
            "alpha_bar": self.alpha_bar,
            "beta_bar": self.beta_bar,
            "gamma_bar": self.gamma_bar,
            "G": self.G,
            "terms": self.terms,
            "bound": self.bound,
            "horizon": self.horizon,
            "log_y_final": self.log_y_final,
            "log_y_max": self.log_y_max,
            "verified": self.verified,
        }


def _series(
    term: Callable[[int], float], tol: float, limit: int
) -> Tuple[float, int, bool]:
    """Partial sums until a term is negligible against the sum so far."""
    total = 0.0
    for j in range(limit):
        t = term(j)
        total += t
        if abs(t) <= tol * max(abs(total), 1.0) and j > 0:
            return total, j + 1, True
    return total, limit, False


def _max_window(logs: List[float]) -> float:
    """Largest sum over consecutive entries, or 0 when every window is negative."""
    best = 0.0
    run = 0.0
    for x in logs:
        run = max(x, run + x)
        best = max(best, run)
    return best


def genn_bound(
    A: Union[float, LogNumber],
    y0: float,
    kappa: Seq,
    r: Seq,
    s: Seq,
    omega: Seq,
    horizon: int = 200,
    max_terms: Optional[int] = None,
) -> GennResult:
    log_A = LogNumber.coerce(A).log
    if log_A < 0:
        raise AdmissibilityError(f"need A >= 1, got exp({log_A:g})", _BOUNDS, "A >= 1")
    if y0 < 0:
        raise AdmissibilityError(f"need y0 >= 0, got {y0}", _BOUNDS, "y0 >= 0")
    limit = get_settings().product_max_terms if max_terms is None else max_terms

    def checked(j: int) -> Tuple[float, float, float, float]:
        k, rj, sj, wj = kappa(j), r(j), s(j), omega(j)
        if not (k > 0 and rj > 0 and wj > 0 and sj >= rj):
            raise AdmissibilityError(
                f"sequence terms at j={j} violate k, r, w > 0, s >= r "
                f"(k={k}, r={rj}, s={sj}, w={wj})",
                _BOUNDS,
                "positive sequences with s_j >= r_j",
            )
        return k, rj, sj, wj

    def a_term(j: int) -> float:
        k, _, _, w = checked(j)
        return w / k

    alpha_bar, n_a, ok = _series(a_term, SERIES_TOLERANCE, limit)
    if not ok:
        raise AdmissibilityError(
            f"sum w_j/k_j has not settled after {limit} terms",
            _BOUNDS,
            "convergent sum w_j/k_j",
        )
    log_b, n_b, _ = _series(
        lambda j: math.log(r(j) / kappa(j)), SERIES_TOLERANCE, limit
    )
    log_g, n_g, _ = _series(
        lambda j: math.log(s(j) / kappa(j)), SERIES_TOLERANCE, limit
    )
    terms = max(n_a, n_b, n_g)
    log_G = _max_window([math.log(s(j) / kappa(j)) for j in range(1, terms)])
    beta_bar, gamma_bar, G = math.exp(log_b), math.exp(log_g), math.exp(log_G)

    log_y0 = math.log(y0) if y0 > 0 else -math.inf
    if y0 > 0:
        top = max(beta_bar * log_y0, gamma_bar * log_y0)
    else:
        top = -math.inf
    log_bound = G * alpha_bar * (math.log(2.0) + log_A) + top

    ly = log_y0
    ly_max = ly
    for j in range(horizon):
        k, rj, sj, wj = checked(j)
        ly = wj / k * log_A + float(np.logaddexp(rj * ly, sj * ly)) / k
        ly_max = max(ly_max, ly)
    verified = ly <= log_bound + math.log1p(ITERATION_SLACK)
    if not verified:
        logger.warning(
            "direct iteration exceeds the sequence bound: log y_%d = %.17g > %.17g",
            horizon,
            ly,
            log_bound,
        )
    return GennResult(
        log_A=log_A,
        y0=y0,
        alpha_bar=alpha_bar,
        beta_bar=beta_bar,
        gamma_bar=gamma_bar,
        G=G,
        terms=terms,
        log_bound=log_bound,
        horizon=horizon,
        log_y_final=ly,
        log_y_max=ly_max,
        verified=verified,
    )


@dataclass(frozen=True)
class MoserCheck:
    genn: GennResult
    log_closed_form: float
    agrees: bool

    def to_dict(self) -> dict:
        return {
            "genn": self.genn.to_dict(),
            "closed_form": LogNumber(self.log_closed_form),
            "agrees": self.agrees,
        }


def moser_genn_check(
    book: ExponentBook, A: LogNumber, y0: float, horizon: int = 3000
) -> MoserCheck:
    """Run the generic lemma on the Moser ladder and compare with
    (2A)^omega max{y0^mu~, y0^nu~} from the precomputed products."""
    if book.moser is None:
        raise AdmissibilityError(
            "Moser check needs moser_products first", _BOUNDS, "moser products"
        )
    mp = book.moser
    result = genn_bound(
        A,
        y0,
        kappa=book.beta,
        r=lambda j: book.nu1(book.beta(j)),
        s=lambda j: book.nu2(book.beta(j)),
        omega=lambda j: float(j + 1),
        horizon=horizon,
    )
    ly0 = math.log(y0) if y0 > 0 else -math.inf
    top = max(mp.mu_tilde * ly0, mp.nu_tilde * ly0) if y0 > 0 else -math.inf
    closed = mp.omega * (math.log(2.0) + A.log) + top
    if math.isinf(closed):
        agrees = closed == result.log_bound
    else:
        agrees = abs(result.log_bound - closed) <= 1e-9 * max(1.0, abs(closed))
    if not agrees:
        logger.warning(
            "Moser cross-check: generic bound log %.17g vs closed form log %.17g",
            result.log_bound,
            closed,
        )
    return MoserCheck(result, closed, agrees)
