"""Exponents of the weighted L^alpha and L^infinity estimates.

Everything here depends only on (n, a, lambda, r1, r, alpha0, kappa_tilde)
and the auxiliary Hoelder exponents p1..p6. The book records every
admissibility condition; building one fails on the first violated condition.
"""

import math
from dataclasses import asdict, dataclass, field, replace
from typing import Dict, List, Mapping, Optional, Tuple

from ..core.log import get_logger
from ..harness.params import r1_violation, r_star, theta_mu
from ..models.base import AdmissibilityError, Component

logger = get_logger(__name__)

_BOUNDS = Component.BOUNDS.value

P3_BISECTION_LIMIT = 200


def default_r(lam: float, a: float) -> float:
    return max(1.0, lam * (3.0 - 2.0 * a) - 1.0 + 0.1)


def r1_interval(n: int, a: float) -> Tuple[float, float]:
    """Open-closed window for r1: max(n/(n+2-a), 1/(2-a)) <= r1 < 1."""
    p = 2.0 - a
    return max(n / (n + p), 1.0 / p), 1.0


def default_r1(n: int, a: float) -> float:
    lo, hi = r1_interval(n, a)
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class PChoices:
    """Hoelder exponents p1..p6 and conjugates q1..q5."""

    p1: float
    p2: float
    p3: float
    p4: float
    p5: float
    p6: float
    defaulted: Tuple[str, ...] = ()

    @property
    def q(self) -> Tuple[float, float, float, float, float]:
        ps = (self.p1, self.p2, self.p3, self.p4, self.p5)
        return tuple(p / (p - 1.0) for p in ps)  # type: ignore[return-value]


def choose_p(
    a: float, kappa_tilde: float, overrides: Optional[Mapping[str, float]] = None
) -> PChoices:
    """Default p_i unless overridden.

    p1 = p2 = (1 + kt)/2, p3 = p4 = sqrt((1 + kt)/2); p3 is bisected toward 1
    until (p3(2-a) - 1)/(1-a) < kt, so that some p5 > 1 keeps
    p6 = p5 (p3(2-a) - 1)/(1-a) below kt. p5 is the midpoint of that window.
    """
    given = dict(overrides or {})
    unknown = set(given) - {"p1", "p2", "p3", "p4", "p5"}
    if unknown:
        raise AdmissibilityError(
            f"unknown p overrides {sorted(unknown)}", _BOUNDS, "p1..p5"
        )
    kt = kappa_tilde
    half = 0.5 * (1.0 + kt)
    defaulted: List[str] = []

    def pick(name: str, value: float) -> float:
        if name in given:
            return float(given[name])
        defaulted.append(name)
        return value

    p1 = pick("p1", half)
    p2 = pick("p2", half)
    p4 = pick("p4", math.sqrt(half))
    if "p3" in given:
        p3 = float(given["p3"])
    else:
        p3 = math.sqrt(half)
        for _ in range(P3_BISECTION_LIMIT):
            if (p3 * (2.0 - a) - 1.0) / (1.0 - a) < kt:
                break
            p3 = 0.5 * (1.0 + p3)
        defaulted.append("p3")
    ratio = (p3 * (2.0 - a) - 1.0) / (1.0 - a)
    p5 = pick("p5", 0.5 * (1.0 + kt / ratio) if ratio > 0 else 2.0)
    p6 = p5 * ratio
    choice = PChoices(p1, p2, p3, p4, p5, p6, tuple(defaulted))
    if defaulted:
        logger.info(
            "default p-choices for kappa_tilde=%.6g: p1=%.6g p2=%.6g p3=%.6g "
            "p4=%.6g p5=%.6g (p6=%.6g)",
            kt,
            p1,
            p2,
            p3,
            p4,
            p5,
            p6,
        )
    return choice


@dataclass(frozen=True)
class MoserProducts:
    """Infinite products and sums of the Moser ladder beta_j = kt^j alpha0."""

    mu_tilde: float
    nu_tilde: float
    G: float
    weight_sum: float  # sum (j+1)/beta_j
    omega: float
    omega1: float
    omega2: float
    omega3: float
    terms_mu: int
    terms_nu: int
    tail_mu: float  # bound on the dropped part of log mu_tilde
    tail_nu: float
    nu_nominal_bound: float
    nu_rigorous_bound: float


@dataclass(frozen=True)
class ExponentBook:
    n: int
    a: float
    lam: float
    r1: float
    r_star: float
    r: float
    r_tilde: float
    alpha: float
    alpha0: float
    kappa_tilde: float
    theta: float
    mu1: float
    theta_tilde: float
    mu1_tilde: float
    m: float
    mu_min: float
    mu_max: float
    p: PChoices
    h1: float
    h2: float
    h3: float
    flags: Dict[str, bool] = field(default_factory=dict)
    conditions: Dict[str, str] = field(default_factory=dict)
    moser: Optional[MoserProducts] = None

    @property
    def p_degree(self) -> float:
        """p = 2 - a, the growth exponent of the flux."""
        return 2.0 - self.a

    @property
    def q(self) -> Tuple[float, float, float, float, float]:
        return self.p.q

    @property
    def beta1(self) -> float:
        return self.kappa_tilde * self.alpha0

    def beta(self, j: int) -> float:
        return self.kappa_tilde**j * self.alpha0

    def kappa_of(self, alpha: float) -> float:
        return 1.0 + self.r_star / 2.0 + (1.0 - self.lam - self.a) / alpha

    @property
    def kappa(self) -> float:
        return self.kappa_of(self.alpha)

    def nu1(self, alpha: float) -> float:
        return (alpha - self.h1) / (1.0 + 1.0 / (alpha * (1.0 + self.r_star / 2.0)))

    def nu2(self, alpha: float) -> float:
        return (alpha + self.h3) / (
            1.0 - self.lam / (alpha * (1.0 + self.r_star / 2.0))
        )

    @property
    def admissible(self) -> bool:
        return all(self.flags.values())

    def with_moser(self, products: MoserProducts) -> "ExponentBook":
        return replace(self, moser=products)

    def to_dict(self) -> Dict[str, object]:
        out = asdict(self)
        out["q"] = list(self.q)
        out["kappa"] = self.kappa
        out["beta1"] = self.beta1
        return out


def _conditions(
    n: int,
    a: float,
    lam: float,
    r1: float,
    rs: float,
    r: float,
    alpha: float,
    alpha0: float,
    kt: float,
    pc: PChoices,
) -> List[Tuple[str, str, bool]]:
    """(flag, condition text, holds) in checking order."""
    out: List[Tuple[str, str, bool]] = []
    bad = r1_violation(n, 2.0 - a, r1)
    out.append(("r1_range", bad or "n/(n+2-a) < r1 < 1 <= r1(2-a)", not bad))
    if bad:
        return out
    r_lo = max(0.0, lam * (3.0 - 2.0 * a) - 1.0)
    out.append(("r_range", f"r > max(0, lambda(3-2a)-1) = {r_lo:.17g}", r > r_lo))
    aa = 2.0 * (2.0 - a) * (r + a + lam - 1.0) / (rs * (1.0 - a))
    out.append(
        (
            "alpha_range",
            f"alpha > max(lambda+1, 2(2-a)(r+a+lambda-1)/(r*(1-a)) = {aa:.17g})",
            alpha > lam + 1.0 and alpha > aa,
        )
    )
    kt_hi = math.sqrt(1.0 + rs / 2.0)
    out.append(
        (
            "kappa_tilde_window",
            f"1 < kappa_tilde < sqrt(1+r*/2) = {kt_hi:.17g}",
            1.0 < kt < kt_hi,
        )
    )
    p_ok = (
        min(pc.p1, pc.p2, pc.p3, pc.p4, pc.p5, pc.p6) > 1.0
        and pc.p1 < kt
        and pc.p2 < kt
        and pc.p3 * pc.p4 < kt
        and pc.p6 < kt
    )
    out.append(
        (
            "p_choices",
            "p_i > 1 with p1, p2, p3 p4, p6 < kappa_tilde",
            p_ok,
        )
    )
    if not (out[-1][2] and out[-2][2]):
        return out
    large = max(
        lam + 1.0,
        pc.p1 * (lam * (3.0 - 2.0 * a) - 1.0) / (kt - pc.p1),
        pc.p5 * (a + lam - 1.0) / ((1.0 - a) * (kt - pc.p6)),
    )
    big = max(2.0 * (lam + a - 1.0) / rs, (1.0 - lam - a) / (kt - 1.0))
    floor0 = max(large, big, (lam + a - 1.0) / (1.0 + rs / 2.0 - kt * kt))
    out.append(("alpha0_ladder", f"alpha0 > {floor0:.17g}", alpha0 > floor0))
    zero = 2.0 * (2.0 - a) * (r + a + lam - 1.0) / (kt * rs * (1.0 - a))
    out.append(
        (
            "alpha0_weighted",
            f"alpha0 > 2(2-a)(r+a+lambda-1)/(kappa_tilde r*(1-a)) = {zero:.17g}",
            alpha0 > zero,
        )
    )
    return out


def build_exponents(
    n: int,
    a: float,
    lam: float,
    r1: Optional[float] = None,
    r: Optional[float] = None,
    alpha0: float = 40.0,
    kappa_tilde: float = 1.03,
    p_overrides: Optional[Mapping[str, float]] = None,
    alpha: Optional[float] = None,
) -> ExponentBook:
    """Every derived exponent; alpha defaults to beta1 = kappa_tilde alpha0."""
    if n not in (2, 3):
        raise AdmissibilityError(
            f"bounds need n in {{2, 3}}, got {n}", _BOUNDS, "n in {2, 3}"
        )
    if not 0 < a < 1 or not lam > 0:
        raise AdmissibilityError(
            f"need 0 < a < 1 and lambda > 0 (a={a}, lambda={lam})",
            _BOUNDS,
            "0 < a < 1, lambda > 0",
        )
    r1 = default_r1(n, a) if r1 is None else float(r1)
    r = default_r(lam, a) if r is None else float(r)
    alpha = kappa_tilde * alpha0 if alpha is None else float(alpha)
    pc = choose_p(a, kappa_tilde, p_overrides)
    rs = r_star(n, 2.0 - a, r1)

    conds = _conditions(n, a, lam, r1, rs, r, alpha, alpha0, kappa_tilde, pc)
    for flag, text, ok in conds:
        if not ok:
            raise AdmissibilityError(
                f"inadmissible bound parameters (n={n}, a={a:g}, lambda={lam:g}, "
                f"r1={r1:g}, r={r:g}, alpha={alpha:g}, alpha0={alpha0:g}, "
                f"kappa_tilde={kappa_tilde:g}): {flag}: {text}",
                _BOUNDS,
                flag,
            )

    p, s = 2.0 - a, lam + 1.0
    theta, mu1 = theta_mu(alpha, r, rs, p, s)
    r_tilde = r + (r - 1.0 + lam + a) / (1.0 - a)
    theta_t, mu1_t = theta_mu(alpha, r_tilde, rs, p, s)
    h2 = max(
        0.0,
        3.0 * (lam - 2.0 * a) - 1.0,
        (a + lam - 1.0) / (pc.p3 * (2.0 - a) - 1.0),
    )
    return ExponentBook(
        n=n,
        a=a,
        lam=lam,
        r1=r1,
        r_star=rs,
        r=r,
        r_tilde=r_tilde,
        alpha=alpha,
        alpha0=alpha0,
        kappa_tilde=kappa_tilde,
        theta=theta,
        mu1=mu1,
        theta_tilde=theta_t,
        mu1_tilde=mu1_t,
        m=(alpha + 1.0 - lam - a) / (2.0 - a),
        mu_min=max(lam + 1.0, -mu1, -mu1_t),
        mu_max=max(mu1, r_tilde, mu1_t),
        p=pc,
        h1=lam + 1.0,
        h2=h2,
        h3=max(h2, 1.0 - a - lam),
        flags={flag: ok for flag, _, ok in conds},
        conditions={flag: text for flag, text, _ in conds},
    )
