"""Weight and data integrals entering the constants of the a-priori bounds.

All values are LogNumbers; an integral whose integrand has a weight below
the divergence floor under a negative power is flagged, not dropped.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.integrate import trapezoid

from ..core.grid import BoundaryField, SpatialField, TimeSeries
from ..core.log import get_logger
from ..core.lognum import ONE, LogNumber, log_max
from ..core.quadrature import power_integral
from ..models.base import Component, ConstitutiveError, QuadratureError
from ..models.weights import WeightFields
from ..types.common import FloatArray
from .exponents import ExponentBook

logger = get_logger(__name__)

_BOUNDS = Component.BOUNDS.value


@dataclass(frozen=True)
class DataIntegrals:
    alpha: float
    r: float
    r1: float
    K1: LogNumber
    K2: LogNumber
    K3: LogNumber
    K4: LogNumber
    K5: LogNumber
    K6: LogNumber
    N1: LogNumber
    N2: LogNumber
    N3: LogNumber
    Psi_T: LogNumber
    Phi_star: LogNumber
    T: float
    M: TimeSeries
    warnings: Tuple[str, ...] = ()
    parts: Dict[str, LogNumber] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, object]:
        out: Dict[str, object] = {
            k: getattr(self, k)
            for k in (
                "alpha",
                "r",
                "r1",
                "K1",
                "K2",
                "K3",
                "K4",
                "K5",
                "K6",
                "N1",
                "N2",
                "N3",
                "Psi_T",
                "Phi_star",
                "T",
            )
        }
        out["M"] = {"t": self.M.times, "value": self.M.values}
        out["warnings"] = list(self.warnings)
        out["parts"] = dict(self.parts)
        return out


class _Collector:
    """power_integral wrapper that remembers which integrals may diverge."""

    def __init__(self, phi: SpatialField):
        self.grid = phi.grid
        self.warnings: List[str] = []

    def __call__(self, label: str, *factors: Tuple[FloatArray, float]) -> LogNumber:
        result = power_integral(self.grid, [(f.ravel(), e) for f, e in factors], label)
        if result.possibly_divergent:
            self.warnings.append(f"{label} may diverge")
        return result.value


def m_series(
    psi: BoundaryField, alpha: float, r: float, T: float
) -> TimeSeries:
    """M(t) = 1 + int_G (psi^-)^{(alpha+r)/r} on the psi sample grid of [0, T]."""
    times = psi.sample_times(T)
    grid = psi.grid
    exponent = (alpha + r) / r
    values = []
    for t in times:
        integral = power_integral(
            grid, [(psi.negative_part(float(t)), exponent)], "M(t)", "boundary"
        ).value
        m = (ONE + integral).value
        if not np.isfinite(m):
            raise QuadratureError(
                f"M(t) overflows at t={t:g} (log {integral.log:.6g})", _BOUNDS
            )
        values.append(m)
    return TimeSeries.from_lists(times, values, "M")


def boundary_time_integral(psi: BoundaryField, q: float, T: float) -> float:
    """int_0^T int_G (psi^-)^q dS dt, trapezoid in time on the psi samples."""
    times = psi.sample_times(T)
    grid = psi.grid
    per_time = [
        power_integral(
            grid, [(psi.negative_part(float(t)), q)], "psi^-", "boundary"
        ).value.value
        for t in times
    ]
    if len(times) < 2:
        return 0.0
    return float(trapezoid(per_time, times))


def compute_data_integrals(
    book: ExponentBook,
    phi: SpatialField,
    law_weights: WeightFields,
    aN: SpatialField,
    psi: BoundaryField,
    T: float,
    alpha: Optional[float] = None,
    r: Optional[float] = None,
) -> DataIntegrals:
    """K1..K6, N1..N3, Psi_T and Phi* for the book's exponents."""
    alpha = book.alpha if alpha is None else alpha
    r = book.r if r is None else r
    if alpha != book.alpha or r != book.r:
        raise ConstitutiveError(
            f"integrals requested at alpha={alpha}, r={r} but the book holds "
            f"alpha={book.alpha}, r={book.r}",
            _BOUNDS,
        )
    if not T > 0:
        raise ConstitutiveError(f"T must be positive, got {T}", _BOUNDS)
    for f in (phi, law_weights.W1, law_weights.W3, aN):
        f.require_positive(_BOUNDS)

    a, lam, r1 = book.a, book.lam, book.r1
    pc = book.p
    q1, q2, q3, q4, q5 = book.q
    ph = phi.values
    w1 = law_weights.W1.values
    w3 = law_weights.W3.values
    an = aN.values
    integral = _Collector(phi)

    K1 = integral("K1", (ph, -1.0))
    K2 = integral(
        "K2",
        (ph, -(alpha + 1.0 - lam - a) / (alpha * (1.0 - a) - 1.0 + lam + a)),
    )
    K3 = integral(
        "K3", (an, alpha / (lam + 1.0)), (ph, 1.0 - alpha / (lam + 1.0))
    )
    K4 = integral("K4", (w1, -r1 / (1.0 - r1)))
    K5 = integral(
        "K5", (w3, (alpha + r) / (r + 1.0 - lam * (3.0 - 2.0 * a)))
    )
    k6_power = -1.0 / (
        (1.0 - a) * (1.0 - book.theta_tilde) * (1.0 + book.mu1_tilde / alpha)
    )
    K6 = integral("K6", (ph, -1.0), (w1, k6_power))

    phi_int = integral("int phi", (ph, 1.0))
    Phi_star = ONE + phi_int
    lift = pc.p3 * (2.0 - a) - 1.0
    parts = {
        "W3_term": integral("N1.W3", (w3, q1), (ph, -q1 / pc.p1)) ** (1.0 / q1),
        "aN_term": integral("N1.aN", (an, q2), (ph, -q2 / pc.p2)) ** (1.0 / q2),
        "phi_term": integral("N1.phi", (ph, -q4 / pc.p4)) ** (1.0 / (pc.p3 * q4)),
        "W1_term": integral(
            "N1.W1", (w1, -q5 / (1.0 - a)), (ph, -q5 / pc.p5)
        )
        ** ((1.0 - a) / (q5 * lift)),
    }
    N1 = Phi_star * (
        ONE + parts["W3_term"] + parts["aN_term"] + parts["phi_term"] + parts["W1_term"]
    )
    rs = book.r_star
    conj = r1 / (1.0 - r1)
    N2 = integral("N2.phi", (ph, 2.0 / rs - 1.0)) ** (rs / 2.0) * (
        K4 ** (1.0 - r1) + integral("N2.phi_r1", (ph, -conj)) ** (1.0 - r1)
    ) ** (1.0 / r1)
    N3 = log_max([N1, N2])

    bt = boundary_time_integral(psi, q3, T)
    Psi_T = ONE + LogNumber.from_value(bt) ** (pc.p3 * (2.0 - a) / (q3 * lift))

    warnings = tuple(integral.warnings)
    for w in warnings:
        logger.warning("data integral %s", w)
    return DataIntegrals(
        alpha=alpha,
        r=r,
        r1=r1,
        K1=K1,
        K2=K2,
        K3=K3,
        K4=K4,
        K5=K5,
        K6=K6,
        N1=N1,
        N2=N2,
        N3=N3,
        Psi_T=Psi_T,
        Phi_star=Phi_star,
        T=T,
        M=m_series(psi, alpha, r, T),
        warnings=warnings,
        parts=parts,
    )


def u0_integrals(
    u0: SpatialField, phi: SpatialField, beta: float
) -> Tuple[LogNumber, LogNumber]:
    """(V0 = 1 + int phi u0^beta, ||u0||_{L^beta_phi})."""
    grid = u0.grid
    raw = power_integral(
        grid, [(np.abs(u0.values).ravel(), beta), (phi.values.ravel(), 1.0)], "V0"
    ).value
    return ONE + raw, raw ** (1.0 / beta)
