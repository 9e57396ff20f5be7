"""Exponent parameters of the weighted Sobolev, trace and parabolic inequalities."""

from dataclasses import asdict, dataclass
from typing import Dict, List, Tuple

from ..core.lognum import LogNumber
from ..models.base import AdmissibilityError, Component

_HARNESS = Component.HARNESS.value


def r_star(n: int, p: float, r1: float) -> float:
    """r* = 1 + p/n - 1/r1."""
    return 1.0 + p / n - 1.0 / r1


def r1_violation(n: int, p: float, r1: float) -> str:
    """Empty when n/(n+p) < r1 < 1 <= r1 p < n, else the failed part."""
    if not n / (n + p) < r1:
        return f"r1 > n/(n+p) = {n / (n + p):.17g} fails for r1 = {r1}"
    if not r1 < 1:
        return f"r1 < 1 fails for r1 = {r1}"
    if not 1 <= r1 * p:
        return f"r1 p >= 1 fails (r1 p = {r1 * p})"
    if not r1 * p < n:
        return f"r1 p < n fails (r1 p = {r1 * p})"
    return ""


def theta_mu(
    alpha: float, r: float, rstar: float, p: float, s: float
) -> Tuple[float, float]:
    """theta = (alpha+2r)/(alpha(1+r*)+2(p-s)) and mu1 = (r+theta(s-p))/(1-theta)."""
    theta = (alpha + 2.0 * r) / (alpha * (1.0 + rstar) + 2.0 * (p - s))
    mu = (r + theta * (s - p)) / (1.0 - theta)
    return theta, mu


def d_one(c4: float, z: float, eta: float, p: float) -> LogNumber:
    """(c4 2^z)^{eta p}."""
    return (LogNumber.from_value(c4) * LogNumber.from_value(2.0) ** z) ** (eta * p)


def d_two(c3: float, z: float, eta: float, p: float) -> LogNumber:
    """(c3 z 2^z)^{eta p / (1 - eta)}."""
    base = LogNumber.from_value(c3 * z) * LogNumber.from_value(2.0) ** z
    return base ** (eta * p / (1.0 - eta))


@dataclass(frozen=True)
class SobolevParams:
    """One admissible parameter set; derived exponents are computed on access.

    Construction fails with AdmissibilityError naming the violated condition.
    """

    n: int
    p: float
    r1: float
    s: float
    r: float
    alpha: float
    epsilon: float

    def __post_init__(self) -> None:
        for condition, ok in self.violations():
            if not ok:
                raise AdmissibilityError(
                    f"inadmissible parameters {self.echo()}: {condition}",
                    _HARNESS,
                    condition,
                )

    def violations(self) -> List[Tuple[str, bool]]:
        rstar = r_star(self.n, self.p, self.r1)
        checks = [
            ("p > 1", self.p > 1),
            ("epsilon > 0", self.epsilon > 0),
            ("r >= 0", self.r >= 0),
        ]
        bad_r1 = r1_violation(self.n, self.p, self.r1)
        checks.append((bad_r1 or "r1 range", not bad_r1))
        if bad_r1:
            return checks
        checks += [
            ("alpha >= s", self.alpha >= self.s),
            (
                "alpha > (p-s)/(p-1)",
                self.alpha > (self.p - self.s) / (self.p - 1.0),
            ),
            (
                "alpha > 2(r+s-p)/r*",
                self.alpha > 2.0 * (self.r + self.s - self.p) / rstar,
            ),
        ]
        return checks

    def echo(self) -> Dict[str, float]:
        return asdict(self)

    @property
    def r_star(self) -> float:
        return r_star(self.n, self.p, self.r1)

    @property
    def m(self) -> float:
        return (self.alpha - self.s + self.p) / self.p

    @property
    def theta(self) -> float:
        return theta_mu(self.alpha, self.r, self.r_star, self.p, self.s)[0]

    @property
    def mu1(self) -> float:
        return theta_mu(self.alpha, self.r, self.r_star, self.p, self.s)[1]

    @property
    def r_tilde(self) -> float:
        return (self.r * self.p + self.s - self.p) / (self.p - 1.0)

    @property
    def theta_tilde(self) -> float:
        return theta_mu(self.alpha, self.r_tilde, self.r_star, self.p, self.s)[0]

    @property
    def mu1_tilde(self) -> float:
        return theta_mu(self.alpha, self.r_tilde, self.r_star, self.p, self.s)[1]

    @property
    def kappa(self) -> float:
        return 1.0 + self.r_star / 2.0 + (self.p - self.s) / self.alpha

    @property
    def theta0(self) -> float:
        """Parabolic interpolation exponent 1/(1 + r* alpha / (2(alpha-s+p)))."""
        return 1.0 / (
            1.0 + self.r_star * self.alpha / (2.0 * (self.alpha - self.s + self.p))
        )

    @property
    def theta0_interp(self) -> float:
        """Interpolation exponent of the stationary inequality.

        (alpha-s+p)(alpha+2r) / ((alpha+r)[alpha(1+r*) + 2(p-s)]); theta equals
        this times (alpha+r)/(alpha-s+p).
        """
        a, r, s, p = self.alpha, self.r, self.s, self.p
        denom = (a + r) * (a * (1 + self.r_star) + 2 * (p - s))
        return (a - s + p) * (a + 2 * r) / denom

    @property
    def trace_branch(self) -> str:
        """'negative' when r~ < 0, else 'nonnegative'."""
        return "negative" if self.r_tilde < 0 else "nonnegative"

    def trace_condition(self) -> Tuple[str, bool]:
        if self.r_tilde < 0:
            return "alpha > |r~|", self.alpha > abs(self.r_tilde)
        bound = 2.0 * (self.r_tilde + self.s - self.p) / self.r_star
        return "alpha > 2(r~+s-p)/r*", self.alpha > bound

    def parabolic_condition(self) -> Tuple[str, bool]:
        ok = (
            self.alpha >= self.s
            and self.alpha > (self.p - self.s) / (self.p - 1.0)
            and self.alpha > 2.0 * (self.s - self.p) / self.r_star
        )
        return "alpha >= s, alpha > (p-s)/(p-1), alpha > 2(s-p)/r*", ok

    def derived(self) -> Dict[str, float]:
        return {
            "r_star": self.r_star,
            "m": self.m,
            "theta": self.theta,
            "mu1": self.mu1,
            "r_tilde": self.r_tilde,
            "theta_tilde": self.theta_tilde,
            "mu1_tilde": self.mu1_tilde,
            "kappa": self.kappa,
            "theta0": self.theta0,
        }

    def with_epsilon(self, epsilon: float) -> "SobolevParams":
        return SobolevParams(
            self.n, self.p, self.r1, self.s, self.r, self.alpha, epsilon
        )


def trace_simple_violation(alpha: float, s: float, p: float) -> str:
    """Empty when alpha >= max{s, (p-s)/(p-1)}."""
    bound = max(s, (p - s) / (p - 1.0))
    if alpha >= bound:
        return ""
    return f"alpha >= max(s, (p-s)/(p-1)) = {bound:.17g} fails for alpha = {alpha}"
