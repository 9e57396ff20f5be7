"""Numerical checks of the weighted Sobolev, trace and parabolic inequalities.

Right-hand sides are assembled in log space; a record passes when
rhs - lhs >= -tol * |rhs|.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..config import get_settings
from ..core.grid import SpatialField
from ..core.lognum import ZERO, LogNumber
from ..core.quadrature import cell_grad_energy, grad_energy, power_integral
from ..models.base import AdmissibilityError, Component, ConfigError
from .calibrate import EmbeddingConstants
from .family import Sample
from .params import SobolevParams, d_one, d_two, trace_simple_violation

_HARNESS = Component.HARNESS.value

FAILURE_NOTE = (
    "a failed record indicts the calibrated embedding constants or the "
    "quadrature, not the inequality itself"
)

Function = Union[Sample, SpatialField]
Weight = Union[SpatialField, np.ndarray, float]


@dataclass(frozen=True)
class CheckRecord:
    check_name: str
    function_id: str
    param_id: str
    lhs: float
    rhs: float
    margin: float
    passed: bool
    lhs_log: float
    rhs_log: float
    branch: str = ""


@dataclass
class CheckReport:
    check_name: str
    records: List[CheckRecord] = field(default_factory=list)
    params: Dict[str, object] = field(default_factory=dict)
    resolution: Tuple[int, ...] = ()
    warnings: List[str] = field(default_factory=list)
    note: str = FAILURE_NOTE

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    @property
    def failures(self) -> List[CheckRecord]:
        return [r for r in self.records if not r.passed]

    @property
    def worst_margin(self) -> float:
        return min((r.margin for r in self.records), default=math.inf)

    def extend(self, other: "CheckReport") -> None:
        self.records.extend(other.records)
        self.warnings.extend(w for w in other.warnings if w not in self.warnings)

    def sorted(self) -> "CheckReport":
        key = lambda r: (r.check_name, r.param_id, r.function_id)  # noqa: E731
        return CheckReport(
            self.check_name,
            sorted(self.records, key=key),
            dict(self.params),
            self.resolution,
            list(self.warnings),
            self.note,
        )


def _as_sample(u: Function) -> Sample:
    return Sample.from_field(u) if isinstance(u, SpatialField) else u


def _weight_values(w: Weight, shape: Tuple[int, ...]) -> np.ndarray:
    values = w.values if isinstance(w, SpatialField) else np.asarray(w, dtype=float)
    return np.broadcast_to(values, shape)


class _Integrals:
    """Weight integrals shared by every check, flagged when possibly divergent."""

    def __init__(self, sample: Sample, phi: Weight, W: Weight) -> None:
        self.sample = sample
        self.grid = sample.grid
        self.phi = _weight_values(phi, self.grid.shape)
        self.W = _weight_values(W, self.grid.shape)
        self.warnings: List[str] = []

    def volume(
        self, factors: Sequence[Tuple[np.ndarray, float]], label: str
    ) -> LogNumber:
        result = power_integral(self.grid, factors, label)
        if result.possibly_divergent:
            self.warnings.append(f"{label} possibly divergent")
        return result.value

    def u_power(self, power: float, weight: Optional[np.ndarray] = None) -> LogNumber:
        factors = [(np.abs(self.sample.values), power)]
        if weight is not None:
            factors.append((weight, 1.0))
        return self.volume(factors, f"int |u|^{power:.6g}")

    def boundary_power(self, power: float) -> LogNumber:
        return power_integral(
            self.grid, [(np.abs(self.sample.boundary), power)], "boundary", "boundary"
        ).value

    def energy(self, alpha: float, s: float, p: float) -> LogNumber:
        if self.sample.gradient is None:
            value = grad_energy(self.sample.values, self.W, alpha, s, p, self.grid)
        else:
            value = cell_grad_energy(
                self.grid, self.sample.values, self.sample.gradient, self.W, alpha, s, p
            )
        return LogNumber.from_value(value)

    # Weight constants of the stationary inequalities

    def g1(self, pr: SobolevParams) -> LogNumber:
        d = pr.alpha * (pr.p - 1.0) + pr.s - pr.p
        return self.volume(
            [(self.phi, -(pr.alpha - pr.s + pr.p) / d)], "G1"
        ) ** (d / pr.alpha)

    def g2(self, pr: SobolevParams) -> LogNumber:
        e = pr.r1 / (1.0 - pr.r1)
        return self.volume([(self.W, -e)], "G2") ** (1.0 / e)

    def g3(self, pr: SobolevParams, omega: np.ndarray) -> LogNumber:
        expo = 1.0 + pr.mu1 / pr.alpha
        inner = self.volume(
            [(self.phi, -1.0), (omega, 1.0 / ((1.0 - pr.theta) * expo))], "G3"
        )
        return inner**expo

    def g4(self, pr: SobolevParams) -> LogNumber:
        return self.volume([(self.phi, -1.0)], "G4") ** (1.0 + pr.mu1 / pr.alpha)

    def g5(self, pr: SobolevParams) -> LogNumber:
        expo = 1.0 + pr.mu1_tilde / pr.alpha
        w_exp = -1.0 / ((pr.p - 1.0) * (1.0 - pr.theta_tilde) * expo)
        inner = self.volume([(self.phi, -1.0), (self.W, w_exp)], "G5")
        return inner**expo

    def phi5(self, pr: SobolevParams) -> LogNumber:
        rt = pr.r_tilde
        inner = self.volume(
            [
                (self.W, pr.alpha / ((pr.p - 1.0) * rt)),
                (self.phi, (pr.alpha + rt) / rt),
            ],
            "Phi5",
        )
        return inner ** (-rt / pr.alpha)

    def phi8(self, pr: SobolevParams) -> LogNumber:
        rs, r1 = pr.r_star, pr.r1
        e = r1 / (1.0 - r1)
        first = self.volume([(self.phi, 2.0 / rs - 1.0)], "Phi8 phi part") ** (rs / 2.0)
        w_part = self.volume([(self.W, -e)], "Phi8 W part") ** (1.0 - r1)
        p_part = self.volume([(self.phi, -e)], "Phi8 phi^-1 part") ** (1.0 - r1)
        return first * (w_part + p_part) ** (1.0 / r1)


def _record(
    check_name: str,
    lhs: LogNumber,
    rhs: LogNumber,
    function_id: str,
    param_id: str,
    branch: str = "",
) -> CheckRecord:
    tol = get_settings().pass_tolerance
    passed = lhs.is_zero or lhs.log <= rhs.log + math.log1p(tol)
    if math.isinf(rhs.value):
        margin = math.inf
    elif math.isinf(lhs.value):
        margin = -math.inf
    else:
        margin = rhs.value - lhs.value
    return CheckRecord(
        check_name,
        function_id,
        param_id,
        lhs.value,
        rhs.value,
        margin,
        passed,
        lhs.log,
        rhs.log,
        branch,
    )


def _report(
    name: str,
    record: CheckRecord,
    params: Dict[str, object],
    ints: _Integrals,
) -> CheckReport:
    return CheckReport(
        name, [record], params, ints.grid.cells, sorted(set(ints.warnings))
    )


def _eps(pr: SobolevParams, power: float) -> LogNumber:
    return LogNumber.from_value(pr.epsilon) ** power


def check_weighted_sobolev(
    u: Function,
    omega: Weight,
    phi: Weight,
    W: Weight,
    params: SobolevParams,
    consts: EmbeddingConstants,
    function_id: str = "",
    param_id: str = "",
) -> CheckReport:
    """int |u|^{alpha+r} omega against the gradient and two weighted-Lebesgue terms."""
    pr = params
    ints = _Integrals(_as_sample(u), phi, W)
    om = _weight_values(omega, ints.grid.shape)
    if np.any(om < 0):
        raise ConfigError("omega must be nonnegative", _HARNESS)
    lhs = ints.u_power(pr.alpha + pr.r, om)
    mass = ints.u_power(pr.alpha, ints.phi)
    g1, g2, g3 = ints.g1(pr), ints.g2(pr), ints.g3(pr, om)
    phi1 = g1**pr.theta * g3 ** (1.0 - pr.theta)
    phi2 = g2 ** (pr.theta / (1.0 - pr.theta)) * g3
    rhs = (
        _eps(pr, 1.0) * ints.energy(pr.alpha, pr.s, pr.p)
        + d_one(consts.c4, pr.m, pr.theta, pr.p)
        * phi1
        * mass ** (1.0 + pr.r / pr.alpha)
        + _eps(pr, -pr.theta / (1.0 - pr.theta))
        * d_two(consts.c3, pr.m, pr.theta, pr.p)
        * phi2
        * mass ** (1.0 + pr.mu1 / pr.alpha)
    )
    record = _record("weighted_sobolev", lhs, rhs, function_id, param_id)
    return _report("weighted_sobolev", record, {**pr.echo(), **pr.derived()}, ints)


def check_trace_simple(
    u: Function,
    W: Weight,
    alpha: float,
    s: float,
    p: float,
    epsilon: float,
    consts: EmbeddingConstants,
    function_id: str = "",
    param_id: str = "",
) -> CheckReport:
    """Boundary integral of |u|^alpha against gradient and volume terms."""
    bad = trace_simple_violation(alpha, s, p)
    if bad:
        raise AdmissibilityError(bad, _HARNESS, "alpha >= max(s, (p-s)/(p-1))")
    if epsilon <= 0:
        raise AdmissibilityError("epsilon must be positive", _HARNESS, "epsilon > 0")
    ints = _Integrals(_as_sample(u), 1.0, W)
    eps = LogNumber.from_value(epsilon)
    lhs = ints.boundary_power(alpha)
    rhs = (
        eps * ints.energy(alpha, s, p)
        + LogNumber.from_value(consts.c5) * ints.u_power(alpha)
        + LogNumber.from_value(consts.c6 * alpha) ** (p / (p - 1.0))
        * eps ** (-1.0 / (p - 1.0))
        * ints.volume(
            [
                (np.abs(ints.sample.values), alpha + (s - p) / (p - 1.0)),
                (ints.W, -1.0 / (p - 1.0)),
            ],
            "trace W term",
        )
    )
    record = _record("trace_simple", lhs, rhs, function_id, param_id)
    params = {"alpha": alpha, "s": s, "p": p, "epsilon": epsilon}
    return _report("trace_simple", record, params, ints)


def check_trace_two_weight(
    u: Function,
    phi: Weight,
    W: Weight,
    params: SobolevParams,
    consts: EmbeddingConstants,
    function_id: str = "",
    param_id: str = "",
) -> CheckReport:
    """Boundary integral of |u|^{alpha+r}; the branch follows the sign of r~."""
    pr = params
    condition, ok = pr.trace_condition()
    if not ok:
        raise AdmissibilityError(
            f"no trace branch admits alpha = {pr.alpha}: {condition} fails",
            _HARNESS,
            condition,
        )
    ints = _Integrals(_as_sample(u), phi, W)
    p, a = pr.p, pr.alpha
    lhs = ints.boundary_power(a + pr.r)
    mass = ints.u_power(a, ints.phi)
    energy = ints.energy(a, pr.s, p)
    c5 = LogNumber.from_value(consts.c5)
    g1, g2, g4 = ints.g1(pr), ints.g2(pr), ints.g4(pr)
    phi3 = g1**pr.theta * g4 ** (1.0 - pr.theta)
    phi4 = g2 ** (pr.theta / (1.0 - pr.theta)) * g4
    z1 = c5 * d_one(consts.c4, pr.m, pr.theta, p)
    z2 = c5 ** (1.0 / (1.0 - pr.theta)) * d_two(consts.c3, pr.m, pr.theta, p)
    z3 = LogNumber.from_value(consts.c6 * (a + pr.r)) ** (p / (p - 1.0))

    rhs = (
        z1 * phi3 * mass ** (1.0 + pr.r / a)
        + _eps(pr, -pr.theta / (1.0 - pr.theta))
        * z2
        * phi4
        * mass ** (1.0 + pr.mu1 / a)
    )
    if pr.trace_branch == "negative":
        rhs = (
            rhs
            + 2.0 * _eps(pr, 1.0) * energy
            + _eps(pr, -1.0 / (p - 1.0))
            * z3
            * ints.phi5(pr)
            * mass ** (1.0 + pr.r_tilde / a)
        )
    else:
        tt = pr.theta_tilde
        g5 = ints.g5(pr)
        phi6 = g1**tt * g5 ** (1.0 - tt)
        phi7 = g2 ** (tt / (1.0 - tt)) * g5
        z4 = z3 * d_one(consts.c4, pr.m, tt, p)
        z5 = z3 ** (1.0 / (1.0 - tt)) * d_two(consts.c3, pr.m, tt, p)
        rhs = (
            rhs
            + 3.0 * _eps(pr, 1.0) * energy
            + _eps(pr, -1.0 / (p - 1.0)) * z4 * phi6 * mass ** (1.0 + pr.r_tilde / a)
            + _eps(pr, -(1.0 / (p - 1.0) + p / (p - 1.0) * tt / (1.0 - tt)))
            * z5
            * phi7
            * mass ** (1.0 + pr.mu1_tilde / a)
        )
    record = _record(
        "trace_two_weight", lhs, rhs, function_id, param_id, pr.trace_branch
    )
    return _report("trace_two_weight", record, {**pr.echo(), **pr.derived()}, ints)


def _trapezoid(times: np.ndarray, values: Sequence[LogNumber]) -> LogNumber:
    total = ZERO
    for k in range(len(times) - 1):
        half = LogNumber.from_value(0.5 * (times[k + 1] - times[k]))
        total = total + half * (values[k] + values[k + 1])
    return total


def check_parabolic_sobolev(
    u_of_t: Sequence[Tuple[float, Function]],
    phi: Weight,
    W: Weight,
    params: SobolevParams,
    consts: EmbeddingConstants,
    T: float,
    function_id: str = "",
    param_id: str = "",
) -> CheckReport:
    """Space-time L^{kappa alpha}_phi norm against energy times a sup-in-time factor."""
    pr = params
    condition, ok = pr.parabolic_condition()
    if not ok:
        raise AdmissibilityError(
            f"parabolic inequality needs {condition}", _HARNESS, condition
        )
    if len(u_of_t) < 2:
        raise ConfigError("the parabolic check needs at least 2 time samples", _HARNESS)
    times = np.array([t for t, _ in u_of_t], dtype=float)
    if np.any(np.diff(times) <= 0) or times[0] < 0 or times[-1] > T * (1 + 1e-12):
        raise ConfigError(
            f"time samples must increase within [0, {T}]", _HARNESS
        )

    kappa_alpha = pr.kappa * pr.alpha
    space_time: List[LogNumber] = []
    energy: List[LogNumber] = []
    sup_norm = ZERO
    warnings: List[str] = []
    samples = [_Integrals(_as_sample(u), phi, W) for _, u in u_of_t]
    for ints in samples:
        space_time.append(ints.u_power(kappa_alpha, ints.phi))
        energy.append(
            ints.energy(pr.alpha, pr.s, pr.p)
            + ints.u_power(pr.alpha - pr.s + pr.p, ints.phi)
        )
        sup_norm = max(sup_norm, ints.u_power(pr.alpha, ints.phi) ** (1.0 / pr.alpha))
        warnings.extend(ints.warnings)
    ints = samples[-1]

    lhs = _trapezoid(times, space_time) ** (1.0 / kappa_alpha)
    prefactor = (
        LogNumber.from_value(consts.c7) ** pr.p
        * LogNumber.from_value(pr.m) ** (1.0 / pr.r1)
        * ints.phi8(pr)
    )
    rhs = (
        (prefactor * _trapezoid(times, energy)) ** (1.0 / kappa_alpha)
        * sup_norm ** (1.0 - pr.theta0)
    )
    record = _record("parabolic_sobolev", lhs, rhs, function_id, param_id)
    report = _report("parabolic_sobolev", record, {**pr.echo(), "T": T}, ints)
    report.warnings = sorted(set(warnings + report.warnings))
    return report


__all__ = [
    "CheckRecord",
    "CheckReport",
    "FAILURE_NOTE",
    "check_parabolic_sobolev",
    "check_trace_simple",
    "check_trace_two_weight",
    "check_weighted_sobolev",
]
