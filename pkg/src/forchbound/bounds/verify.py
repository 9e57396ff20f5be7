"""Empirical check of a numerical solution against the certified bounds.

The check is one-sided: a failure says the discretization or one of the
audited inputs (embedding constants, data integrals, horizon) is wrong,
not that the bound is tight.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..config import get_settings
from ..core.log import get_logger
from ..core.lognum import LogNumber
from ..core.quadrature import power_integral
from ..models.base import Component, VerificationError
from ..solver.fv import SolutionTrace
from .curves import BoundReport
from .exponents import ExponentBook

logger = get_logger(__name__)

_BOUNDS = Component.BOUNDS.value

RATIO_CAP = 1e300
SABOTAGE_DIVISOR = 1e10

AUDIT_NOTE = (
    "a failed margin indicts the discretization or the audited inputs: "
    "embedding constants c1..c7, data integrals K1..K6 and N1..N3, "
    "the boundary data integral Psi_T and the horizon T"
)

MARGIN_COLUMNS = (
    "check",
    "t",
    "value",
    "bound",
    "log_value",
    "log_bound",
    "ratio",
    "pass",
)


@dataclass(frozen=True)
class MarginRow:
    check: str
    t: float
    value: LogNumber
    bound: LogNumber
    ratio: float  # bound / value, capped
    passed: bool

    def as_row(self) -> Tuple[object, ...]:
        return (
            self.check,
            self.t,
            self.value.value,
            self.bound.value,
            self.value.log,
            self.bound.log,
            self.ratio,
            self.passed,
        )


@dataclass(frozen=True)
class MarginReport:
    rows: Tuple[MarginRow, ...]
    certified: bool
    sabotaged: bool
    notes: Tuple[str, ...] = ()
    note: str = AUDIT_NOTE
    summary: Dict[str, object] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.certified and all(r.passed for r in self.rows)

    @property
    def failures(self) -> List[MarginRow]:
        return [r for r in self.rows if not r.passed]

    @property
    def worst_ratio(self) -> float:
        return min((r.ratio for r in self.rows), default=RATIO_CAP)

    def to_dict(self) -> Dict[str, object]:
        return {
            "passed": self.passed,
            "certified": self.certified,
            "sabotaged": self.sabotaged,
            "worst_ratio": self.worst_ratio,
            "failures": len(self.failures),
            "checks": len(self.rows),
            "notes": list(self.notes),
            "audit": self.note,
            **self.summary,
        }


def _ratio(value: LogNumber, bound: LogNumber) -> float:
    if value.is_zero:
        return RATIO_CAP
    d = bound.log - value.log
    if d >= math.log(RATIO_CAP):
        return RATIO_CAP
    return math.exp(d)


def _row(check: str, t: float, value: LogNumber, bound: LogNumber) -> MarginRow:
    slack = math.log1p(get_settings().pass_tolerance)
    return MarginRow(
        check, t, value, bound, _ratio(value, bound), value.log <= bound.log + slack
    )


def verify_solution_against_bounds(
    trace: SolutionTrace,
    report: BoundReport,
    book: ExponentBook,
    sabotage: Optional[float] = None,
) -> MarginReport:
    """int phi u^beta1 <= V(t) at every snapshot before the horizon, and
    max u over snapshots in (epsilon, T] <= the L^infinity bound."""
    sc = trace.scenario
    if report.alpha != book.alpha or book.alpha != book.beta1:
        raise VerificationError(
            "bound report and exponent book disagree on alpha = beta1", _BOUNDS
        )
    if report.T > sc.t_final * (1 + 1e-12) or report.T < sc.t_final * (1 - 1e-12):
        raise VerificationError(
            f"bound horizon T={report.T:g} differs from the solution's "
            f"T_final={sc.t_final:g}",
            _BOUNDS,
        )
    log_cut = math.log(sabotage) if sabotage else 0.0
    notes: List[str] = []
    rows: List[MarginRow] = []
    phi = sc.phi.values.ravel()
    thr = report.T_threshold
    for t, u in zip(trace.snapshot_times, trace.snapshots):
        if not t < thr:
            continue
        value = power_integral(
            sc.grid, [(u.values.ravel(), book.beta1), (phi, 1.0)], "int phi u^beta1"
        ).value
        bound = LogNumber(report.v_at(float(t)).log - log_cut)
        rows.append(_row("L_beta1", float(t), value, bound))

    if report.certified and report.linf_bound is not None and report.epsilon:
        window = [
            (t, u)
            for t, u in zip(trace.snapshot_times, trace.snapshots)
            if report.epsilon < t <= report.T
        ]
        if not window:
            notes.append(
                f"no snapshot inside (epsilon, T] = ({report.epsilon:g}, {report.T:g}]"
            )
        else:
            t_max, u_max = max(window, key=lambda p: float(np.max(p[1].values)))
            value = LogNumber.from_value(float(np.max(u_max.values)))
            bound = LogNumber(report.linf_bound.log - log_cut)
            rows.append(_row("L_inf", float(t_max), value, bound))
    else:
        notes.append("L^infinity bound not certified for this horizon")

    margin = MarginReport(
        tuple(rows),
        report.certified,
        sabotage is not None,
        tuple(notes),
        summary={"T": report.T, "T_threshold": thr, "delta_T": report.delta_T},
    )
    for r in margin.failures:
        logger.warning(
            "%s at t=%.6g: value 10^%.6g exceeds bound 10^%.6g",
            r.check,
            r.t,
            r.value.log10,
            r.bound.log10,
        )
    if not margin.passed:
        logger.warning(AUDIT_NOTE)
    return margin
