"""The L^alpha bound curve V(t), its validity horizon and the RK4 oracle.

V(t) = (V0^{-mu/alpha} - (3 Z* mu / alpha) int_0^t M)^{-alpha/mu} solves
V' = 3 Z* M V^{1+mu/alpha}. Z* is routinely astronomically large, so the
horizon and the curve are carried as logarithms.
"""

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.integrate import cumulative_trapezoid

from ..core.grid import SpatialField, TimeSeries
from ..core.log import get_logger
from ..core.lognum import LogNumber
from ..core.quadrature import power_integral
from ..models.base import Component, ConfigError
from ..types.common import FloatArray
from .constants import ProofConstants
from .exponents import ExponentBook

logger = get_logger(__name__)

_BOUNDS = Component.BOUNDS.value

HORIZON_MARGIN = 0.999
RK4_SUBSTEPS = 64


@dataclass(frozen=True)
class RiccatiBound:
    """Closed-form solution of V' = 3 Z* M(t) V^{1+mu/alpha}, V(0) = V0.

    M is piecewise linear between its samples and held constant after the
    last one.
    """

    zstar: LogNumber
    mu: float
    alpha: float
    V0: LogNumber
    M: TimeSeries

    def __post_init__(self) -> None:
        if self.V0.log < 0:
            raise ConfigError(f"V0 must be >= 1, got {self.V0.value}", _BOUNDS)
        if np.any(self.M.values < 1.0):
            raise ConfigError("M(t) samples must be >= 1", _BOUNDS)
        if self.M.times[0] != 0.0:
            raise ConfigError("M(t) must be sampled from t = 0", _BOUNDS)
        if not (self.mu > 0 and self.alpha > 0):
            raise ConfigError("need mu_max > 0 and alpha > 0", _BOUNDS)

    @cached_property
    def cumulative(self) -> FloatArray:
        return cumulative_trapezoid(self.M.values, self.M.times, initial=0.0)

    @property
    def log_target(self) -> float:
        """log of alpha / (3 Z* mu) V0^{-mu/alpha}, the budget for int_0^T M."""
        return (
            math.log(self.alpha)
            - math.log(3.0)
            - self.zstar.log
            - math.log(self.mu)
            - self.mu / self.alpha * self.V0.log
        )

    def m_at(self, t: float) -> float:
        return float(np.interp(t, self.M.times, self.M.values))

    def integral_m(self, t: float) -> float:
        """int_0^t M."""
        times, values, cum = self.M.times, self.M.values, self.cumulative
        if t <= 0:
            return 0.0
        if t >= times[-1]:
            return float(cum[-1] + values[-1] * (t - times[-1]))
        i = int(np.searchsorted(times, t, side="right")) - 1
        return float(cum[i] + 0.5 * (t - times[i]) * (values[i] + self.m_at(t)))

    def fraction(self, t: float) -> float:
        """int_0^t M divided by the budget; the curve is finite while this is < 1."""
        f = self.integral_m(t)
        if f <= 0:
            return 0.0
        d = math.log(f) - self.log_target
        return math.inf if d > 700.0 else math.exp(d)

    def log_v(self, t: float) -> float:
        frac = self.fraction(t)
        if frac >= 1.0:
            return math.inf
        return self.V0.log - self.alpha / self.mu * math.log1p(-frac)

    def v_at(self, t: float) -> LogNumber:
        return LogNumber(self.log_v(t))

    @cached_property
    def log_threshold(self) -> float:
        """log T_threshold, where int_0^T M reaches the budget.

        On the bracketing interval M is linear, so int M is quadratic there
        and the root is taken in the cancellation-free form 2G/(M + sqrt(...)).
        """
        times, values, cum = self.M.times, self.M.values, self.cumulative
        lt = self.log_target
        if len(times) == 1:
            return lt - math.log(values[0])
        target = math.exp(lt)
        i = int(np.searchsorted(cum, target, side="left")) - 1 if target > 0 else 0
        i = max(i, 0)
        if i >= len(times) - 1 and target > cum[-1]:
            return math.log(times[-1] + (target - cum[-1]) / values[-1])
        m0, m1 = values[i], values[i + 1]
        slope = (m1 - m0) / (times[i + 1] - times[i])
        if i == 0:
            log_gap = lt
            gap = target
        else:
            gap = target - cum[i]
            log_gap = math.log(gap)
        disc = math.sqrt(m0 * m0 + 2.0 * slope * gap)
        log_tau = math.log(2.0) + log_gap - math.log(m0 + disc)
        if i == 0:
            return log_tau
        return math.log(times[i] + math.exp(log_tau))

    @property
    def threshold(self) -> float:
        return math.exp(self.log_threshold)

    def rk4_log_v(self, grid: FloatArray, substeps: int = RK4_SUBSTEPS) -> FloatArray:
        """Classical RK4 for y = log V, in the time unit T_threshold."""
        lt = self.log_threshold
        scale = lt + math.log(3.0) + self.zstar.log
        ratio = self.mu / self.alpha

        def rate(s: float, y: float) -> float:
            t = s * math.exp(lt)
            return math.exp(scale + math.log(self.m_at(t)) + ratio * y)

        s_grid = np.asarray(grid, dtype=float) / math.exp(lt)
        out = np.empty_like(s_grid)
        y = self.V0.log
        s = 0.0
        for k, target in enumerate(s_grid):
            h = (target - s) / substeps
            for _ in range(substeps if h > 0 else 0):
                k1 = rate(s, y)
                k2 = rate(s + h / 2, y + h * k1 / 2)
                k3 = rate(s + h / 2, y + h * k2 / 2)
                k4 = rate(s + h, y + h * k3)
                y += h * (k1 + 2 * k2 + 2 * k3 + k4) / 6
                s += h
            s = target
            out[k] = y
        return out


@dataclass(frozen=True)
class BoundReport:
    """Bound curves for one scenario; the L^infinity fields are filled later."""

    alpha: float
    mu_max: float
    mu_min: float
    zstar: LogNumber
    V0: LogNumber
    M: TimeSeries
    log_target: float
    log_T_threshold: float
    T: float
    times: FloatArray
    log_v: FloatArray
    riccati: RiccatiBound = field(repr=False, compare=False)
    beta: Optional[float] = None
    C_alpha_beta: Optional[LogNumber] = None
    log_ube: Optional[FloatArray] = None
    log_oracle: Optional[FloatArray] = None
    delta_T: float = math.nan
    linf_bound: Optional[LogNumber] = None
    linf_integral_bound: Optional[LogNumber] = None
    certified: bool = False
    epsilon: Optional[float] = None
    u0_norm: Optional[float] = None
    notes: Tuple[str, ...] = ()
    extras: Dict[str, object] = field(default_factory=dict)

    @property
    def T_threshold(self) -> float:
        return math.exp(self.log_T_threshold)

    def v_at(self, t: float) -> LogNumber:
        return self.riccati.v_at(t)

    def curve_rows(self) -> List[Dict[str, object]]:
        rows = []
        for k, t in enumerate(self.times):
            row: Dict[str, object] = {
                "t": float(t),
                "V": LogNumber(float(self.log_v[k])).value,
                "log_V": float(self.log_v[k]),
            }
            if self.log_ube is not None:
                row["L_beta_bound"] = LogNumber(float(self.log_ube[k])).value
            if self.log_oracle is not None:
                row["V_rk4"] = LogNumber(float(self.log_oracle[k])).value
            rows.append(row)
        return rows

    def to_dict(self) -> Dict[str, object]:
        return {
            "alpha": self.alpha,
            "mu_max": self.mu_max,
            "mu_min": self.mu_min,
            "Zstar": self.zstar,
            "V0": self.V0,
            "M": {"t": self.M.times, "value": self.M.values},
            "log_target": self.log_target,
            "T_threshold": {"value": self.T_threshold, "log": self.log_T_threshold},
            "T": self.T,
            "beta": self.beta,
            "C_alpha_beta": self.C_alpha_beta,
            "delta_T": self.delta_T,
            "Linf_bound": self.linf_bound,
            "Linf_integral_bound": self.linf_integral_bound,
            "certified": self.certified,
            "epsilon": self.epsilon,
            "u0_norm": self.u0_norm,
            "notes": list(self.notes),
            **self.extras,
        }


def c_alpha_beta(phi: SpatialField, alpha: float, beta: float) -> LogNumber:
    """C_{alpha,beta} = int phi^{-beta/(alpha-beta)}, finite for 0 < beta < alpha."""
    if not 0 < beta < alpha:
        raise ConfigError(
            f"need 0 < beta < alpha (beta={beta}, alpha={alpha})", _BOUNDS
        )
    return power_integral(
        phi.grid, [(phi.values.ravel(), -beta / (alpha - beta))], "C_alpha_beta"
    ).value


def alpha_bound_curve(
    book: ExponentBook,
    proof: ProofConstants,
    V0: LogNumber,
    M_series: TimeSeries,
    T: float,
    beta: Optional[float] = None,
    phi: Optional[SpatialField] = None,
    points: int = 101,
    oracle: bool = False,
) -> BoundReport:
    """Threshold, V(t) on [0, min(T, 0.999 T_threshold)] and optional extras."""
    if proof.alpha != book.alpha:
        raise ConfigError("proof constants were built for another alpha", _BOUNDS)
    if points < 2:
        raise ConfigError("curve needs at least two points", _BOUNDS)
    ric = RiccatiBound(proof.zstar, book.mu_max, book.alpha, V0, M_series)
    log_thr = ric.log_threshold
    thr = math.exp(log_thr)
    notes: List[str] = []
    if not thr > 0:
        notes.append(f"T_threshold underflows (log {log_thr:.6g}); curve degenerate")
        logger.warning(notes[-1])
    end = min(T, HORIZON_MARGIN * thr)
    if end < T:
        notes.append(f"curve stops at {HORIZON_MARGIN:g} T_threshold, before T={T:g}")
    times = np.linspace(0.0, end, points) if end > 0 else np.zeros(1)
    log_v = np.array([ric.log_v(float(t)) for t in times])

    cab = None
    log_ube = None
    if beta is not None:
        if phi is None:
            raise ConfigError("the L^beta curve needs phi", _BOUNDS)
        cab = c_alpha_beta(phi, book.alpha, beta)
        ratio = beta / book.alpha
        log_ube = (1.0 - ratio) * cab.log + ratio * log_v

    log_oracle = ric.rk4_log_v(times) if oracle and thr > 0 else None
    logger.info(
        "T_threshold = %.6g (log %.6g) for alpha=%g, mu_max=%g",
        thr,
        log_thr,
        book.alpha,
        book.mu_max,
    )
    return BoundReport(
        alpha=book.alpha,
        mu_max=book.mu_max,
        mu_min=book.mu_min,
        zstar=proof.zstar,
        V0=V0,
        M=M_series,
        log_target=ric.log_target,
        log_T_threshold=log_thr,
        T=T,
        times=times,
        log_v=log_v,
        riccati=ric,
        beta=beta,
        C_alpha_beta=cab,
        log_ube=log_ube,
        log_oracle=log_oracle,
        delta_T=ric.fraction(T),
        notes=tuple(notes),
    )
