"""Independent straight-line recomputation of the proof constants.

Same formulas as constants.py and linfty.py, written out on plain natural
logarithms instead of LogNumber. Used as an oracle: the two code paths share
no helpers beyond the inputs.
"""

import math
from typing import Dict, Optional

from scipy.special import logsumexp

from ..harness.calibrate import EmbeddingConstants
from .exponents import ExponentBook
from .integrals import DataIntegrals


def _lse(*logs: float) -> float:
    return float(logsumexp(logs))


def straight_line_logs(
    book: ExponentBook,
    integrals: DataIntegrals,
    cz: float,
    consts: EmbeddingConstants,
) -> Dict[str, float]:
    a = book.a
    lam = book.lam
    al = book.alpha
    r = book.r
    r1 = book.r1
    th = book.theta
    tt = book.theta_tilde
    m = book.m
    p = 2.0 - a
    L2 = math.log(2.0)

    k1 = integrals.K1.log
    k2 = integrals.K2.log
    k3 = integrals.K3.log
    k4 = integrals.K4.log
    k5 = integrals.K5.log
    k6 = integrals.K6.log

    out: Dict[str, float] = {}
    c0 = (a - 1.0) * L2
    c1 = p * ((1.0 - a) * L2 + math.log(cz)) if cz > 0 else -math.inf
    expo = (al + r) / (r - lam * (3.0 - 2.0 * a) + 1.0)
    c2 = expo * (L2 + c1) if cz > 0 else -math.inf
    e2 = c0 - math.log(8.0)
    e3 = c0 + math.log(al - lam) - math.log(24.0)

    d1 = th * p * (math.log(consts.c4) + m * L2)
    d2 = th * p / (1.0 - th) * (math.log(consts.c3 * m) + m * L2)
    d1t = tt * p * (math.log(consts.c4) + m * L2)
    d2t = tt * p / (1.0 - tt) * (math.log(consts.c3 * m) + m * L2)

    g1 = k2 * (al * (1.0 - a) - 1.0 + lam + a) / al
    g2 = k4 * (1.0 - r1) / r1
    g3 = k1 * (1.0 + book.mu1 / al)
    g5 = k6 * (1.0 + book.mu1_tilde / al)
    f1 = th * g1 + (1.0 - th) * g3
    f2 = th / (1.0 - th) * g2 + g3
    f6 = tt * g1 + (1.0 - tt) * g5
    f7 = tt / (1.0 - tt) * g2 + g5

    z1 = max(d1 + f1, -th / (1.0 - th) * e2 + d2 + f2)
    z2 = k3 * (lam + 1.0) / al
    lc5 = math.log(consts.c5)
    tb = math.log(consts.c6 * (al + r))
    z3 = max(
        lc5 + d1 + f1,
        -th / (1.0 - th) * e3 + lc5 / (1.0 - th) + d2 + f2,
        -e3 / (1.0 - a) + tb * p / (1.0 - a) + d1t + f6,
        -e3 * (1.0 / (1.0 - a) + p / (1.0 - a) * tt / (1.0 - tt))
        + tb * p / ((1.0 - a) * (1.0 - tt))
        + d2t
        + f7,
    )
    lg = math.log(al - lam)
    z4 = _lse(L2 + _lse(lg + z1, z3), math.log(0.5) + lg + z2, L2 + z3)
    zstar = math.log(al / lam) + max(0.0, z4, c2 + lg + k5)
    out["Zstar"] = zstar
    out["Z4"] = z4

    p3 = book.p.p3
    c10 = math.log(20.0) + max(
        L2 + c1,
        math.log(4.0 * lam),
        lc5 / p3,
        (math.log(4.0) + p * math.log(2.0 * consts.c6 * p3)) / (p3 * p - 1.0),
    )
    c8 = c10 - math.log(lam)
    c9 = math.log(8.0) + c10
    rs = book.r_star
    c11 = (
        (4.0 + rs) * L2
        + max(0.0, p * math.log(consts.c7))
        + (1.0 + rs / 2.0) * max(c8, c9)
    )
    out["c11"] = c11

    if book.moser is not None:
        mp = book.moser
        chat0 = mp.omega * (
            (2.0 + rs / 2.0) * L2
            + c11
            + 3.0 * (3.0 - 2.0 * a) / (2.0 * (1.0 - a)) * math.log(book.beta1)
        )
        out["Chat2"] = chat0 + mp.omega2 * L2 + mp.nu_tilde / book.beta1 * L2
    return out


def straight_line_linf_log(
    book: ExponentBook,
    logs: Dict[str, float],
    integrals: DataIntegrals,
    epsilon: float,
    T: float,
    delta_T: float,
    u0_norm: float,
) -> Optional[float]:
    """log of the L^infinity bound, or None when delta_T >= 1."""
    if book.moser is None or not delta_T < 1.0:
        return None
    mp = book.moser
    return (
        logs["Chat2"]
        - mp.omega2 * math.log(epsilon)
        + (mp.omega1 + mp.nu_tilde / book.beta1) * math.log1p(T)
        - mp.nu_tilde / book.mu_max * math.log1p(-delta_T)
        + mp.omega3 * integrals.N3.log
        + mp.omega2 * integrals.Psi_T.log
        + mp.nu_tilde * math.log1p(u0_norm)
    )
