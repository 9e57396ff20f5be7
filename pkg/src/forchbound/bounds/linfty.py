"""L^infinity bound on (epsilon, T) from the L^beta1 curve and the Moser constants."""

import math
from dataclasses import replace
from typing import List, Optional

import numpy as np
from scipy.special import logsumexp

from ..core.log import get_logger
from ..core.lognum import LogNumber
from ..models.base import AdmissibilityError, Component, ConfigError
from .constants import ProofConstants, moser_amplitude, with_chat
from .curves import BoundReport
from .exponents import ExponentBook
from .genn import moser_genn_check
from .integrals import DataIntegrals

logger = get_logger(__name__)

_BOUNDS = Component.BOUNDS.value

INTEGRAL_POINTS = 257


def _log_integral_v(report: BoundReport, T: float) -> float:
    """log int_0^T V(t) dt by the trapezoid rule on log-values."""
    times = np.linspace(0.0, T, INTEGRAL_POINTS)
    logs = np.array([report.riccati.log_v(float(t)) for t in times])
    if not np.all(np.isfinite(logs)):
        return math.inf
    dt = times[1] - times[0]
    weights = np.full(times.size, dt)
    weights[0] = weights[-1] = dt / 2
    return float(logsumexp(logs, b=weights))


def linfty_bound(
    book: ExponentBook,
    integrals: DataIntegrals,
    proof: ProofConstants,
    report: BoundReport,
    T: float,
    epsilon: float,
    u0_norm: float,
    cross_check: bool = False,
) -> BoundReport:
    """Complete ``report`` with delta_T, the bound on max u over (epsilon, T)
    and, when T is inside the horizon, its certification.

    The bound is Chat2 eps^{-omega2} (1+T)^{omega1 + nu~/beta1}
    (1-delta_T)^{-nu~/mu_max} N3^omega3 Psi_T^omega2 (1 + ||u0||)^nu~.
    The integral form with Chat1 and int_0^T V is reported next to it.
    """
    if book.moser is None:
        raise ConfigError("linfty_bound needs moser_products first", _BOUNDS)
    if book.alpha != book.beta1:
        raise ConfigError(
            f"the L^infinity chain needs alpha = beta1 = {book.beta1:g}, "
            f"got {book.alpha:g}",
            _BOUNDS,
        )
    if not T > 0:
        raise ConfigError(f"T must be positive, got {T}", _BOUNDS)
    if not 0 < epsilon < min(1.0, T):
        raise AdmissibilityError(
            f"need 0 < epsilon < min(1, T) = {min(1.0, T):g}, got {epsilon:g}",
            _BOUNDS,
            "epsilon < min(1, T)",
        )
    if not proof.has_chat:
        proof = with_chat(book, proof)
    mp = book.moser
    notes: List[str] = list(report.notes)
    delta = report.riccati.fraction(T)
    certified = delta < 1.0
    log_common = (
        mp.omega3 * integrals.N3.log
        + mp.omega2 * integrals.Psi_T.log
        - mp.omega2 * math.log(epsilon)
    )
    linf: Optional[LogNumber] = None
    linf_int: Optional[LogNumber] = None
    if certified:
        linf = LogNumber(
            proof["Chat2"].log
            + log_common
            + (mp.omega1 + mp.nu_tilde / book.beta1) * math.log1p(T)
            - mp.nu_tilde / book.mu_max * math.log1p(-delta)
            + mp.nu_tilde * math.log1p(u0_norm)
        )
        log_iv = _log_integral_v(report, T)
        top = max(mp.mu_tilde * log_iv, mp.nu_tilde * log_iv) / book.beta1
        linf_int = LogNumber(
            proof["Chat1"].log + log_common + mp.omega1 * math.log1p(T) + top
        )
        logger.info(
            "L^infinity bound on (%g, %g): 10^%.6g (delta_T = %.6g)",
            epsilon,
            T,
            linf.log10,
            delta,
        )
    else:
        notes.append(
            f"T = {T:g} is not below T_threshold = {report.T_threshold:g} "
            f"(delta_T = {delta:.6g}); L^infinity bound not certified"
        )
        logger.warning(notes[-1])

    extras = dict(report.extras)
    if cross_check and certified:
        sigma = epsilon / T
        A = moser_amplitude(proof, book, integrals, T, sigma)
        y0 = math.exp(_log_integral_v(report, T) / book.beta1)
        check = moser_genn_check(book, A, y0)
        extras["moser_check"] = check.to_dict()
        if not check.agrees:
            notes.append("generic sequence bound disagrees with the Moser closed form")
    return replace(
        report,
        T=T,
        delta_T=delta,
        linf_bound=linf,
        linf_integral_bound=linf_int,
        certified=certified,
        epsilon=epsilon,
        u0_norm=u0_norm,
        notes=tuple(notes),
        extras=extras,
    )
