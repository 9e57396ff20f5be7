"""Proof constants of the L^alpha differential inequality and the L^infinity chain.

Every intermediate is a LogNumber; PROVENANCE maps each name to the formula
it was built from so a report can be audited line by line.
"""

from dataclasses import dataclass, replace
from typing import Dict

from ..core.log import get_logger
from ..core.lognum import ONE, LogNumber, log_max
from ..harness.calibrate import EmbeddingConstants
from ..harness.params import d_one, d_two
from ..models.base import Component, ConfigError
from .exponents import ExponentBook
from .integrals import DataIntegrals

logger = get_logger(__name__)

_BOUNDS = Component.BOUNDS.value

PROVENANCE: Dict[str, str] = {
    "c0": "2^(a-1)",
    "C1": "(2^(1-a) C_Z)^(2-a)",
    "C2": "(2 C1)^((alpha+r)/(r-lambda(3-2a)+1))",
    "eps2": "c0/8",
    "eps3": "c0 (alpha-lambda)/24",
    "D1_theta": "(c4 2^m)^(theta (2-a))",
    "D2_theta": "(c3 m 2^m)^(theta (2-a)/(1-theta))",
    "D1_theta_tilde": "(c4 2^m)^(theta~ (2-a))",
    "D2_theta_tilde": "(c3 m 2^m)^(theta~ (2-a)/(1-theta~))",
    "G1": "K2^((alpha(1-a)-1+lambda+a)/alpha)",
    "G2": "K4^((1-r1)/r1)",
    "G3": "K1^(1+mu1/alpha)",
    "G5": "K6^(1+mu1~/alpha)",
    "Phi1": "G1^theta G3^(1-theta)",
    "Phi2": "G2^(theta/(1-theta)) G3",
    "Phi6": "G1^theta~ G5^(1-theta~)",
    "Phi7": "G2^(theta~/(1-theta~)) G5",
    "Z1": "max{D1 Phi1, eps2^(-theta/(1-theta)) D2 Phi2}",
    "Z2": "K3^((lambda+1)/alpha)",
    "Z3": "max of the four trace terms in c5, c6, eps3",
    "Z4": "2((alpha-lambda) Z1 + Z3) + (alpha-lambda) Z2/2 + 2 Z3",
    "Zstar": "(alpha/lambda) max{1, Z4, C2 (alpha-lambda) K5}",
    "C1_tilde": "2 C1",
    "c10": "20 max{C1~, 4 lambda, c5^(1/p3), [4 (2 c6 p3)^(2-a)]^(1/(p3(2-a)-1))}",
    "c8": "c10/lambda",
    "c9": "8 c10",
    "c11": "2^(4+r*) max{1, c7^(2-a)} max{c8, c9}^(1+r*/2)",
    "Chat0": "[2^(2+r*/2) c11 (kappa~ alpha0)^(3(3-2a)/(2(1-a)))]^omega",
    "Chat1": "2^omega2 Chat0",
    "Chat2": "2^(nu~/beta1) Chat1",
}


def _num(x: float) -> LogNumber:
    return LogNumber.from_value(x)


@dataclass(frozen=True)
class ProofConstants:
    alpha: float
    r: float
    r1: float
    cz: float
    values: Dict[str, LogNumber]
    embedding: EmbeddingConstants

    def __getitem__(self, name: str) -> LogNumber:
        return self.values[name]

    @property
    def zstar(self) -> LogNumber:
        return self.values["Zstar"]

    @property
    def has_chat(self) -> bool:
        return "Chat2" in self.values

    def to_dict(self) -> Dict[str, object]:
        return {
            "alpha": self.alpha,
            "r": self.r,
            "r1": self.r1,
            "C_Z": self.cz,
            "constants": {
                k: {**v.to_dict(), "provenance": PROVENANCE.get(k, "")}
                for k, v in self.values.items()
            },
            "embedding": self.embedding.to_dict(),
        }


def _check_consistent(book: ExponentBook, integrals: DataIntegrals) -> None:
    mismatched = [
        name
        for name, mine, theirs in (
            ("alpha", book.alpha, integrals.alpha),
            ("r", book.r, integrals.r),
            ("r1", book.r1, integrals.r1),
        )
        if mine != theirs
    ]
    if mismatched:
        raise ConfigError(
            f"exponent book and data integrals disagree on {', '.join(mismatched)}",
            _BOUNDS,
        )


def compute_Zstar(
    book: ExponentBook,
    integrals: DataIntegrals,
    cz: float,
    consts: EmbeddingConstants,
) -> ProofConstants:
    """Z* of the differential inequality for int phi u^alpha, with every step kept.

    eps2 = c0/8 and eps3 = c0 (alpha - lambda)/24 absorb the gradient terms;
    the remaining powers of the energy are collected under mu_min and mu_max.
    """
    _check_consistent(book, integrals)
    if cz < 0:
        raise ConfigError(f"C_Z must be nonnegative, got {cz}", _BOUNDS)
    a, lam, alpha, r, r1 = book.a, book.lam, book.alpha, book.r, book.r1
    p = 2.0 - a
    theta, theta_t = book.theta, book.theta_tilde
    m = book.m
    c3, c4, c5, c6 = consts.c3, consts.c4, consts.c5, consts.c6
    K1, K2, K3, K4, K5, K6 = (
        integrals.K1,
        integrals.K2,
        integrals.K3,
        integrals.K4,
        integrals.K5,
        integrals.K6,
    )

    v: Dict[str, LogNumber] = {}
    v["c0"] = _num(2.0 ** (a - 1.0))
    v["C1"] = _num(2.0 ** (1.0 - a) * cz) ** p
    v["C2"] = (2 * v["C1"]) ** ((alpha + r) / (r - lam * (3.0 - 2.0 * a) + 1.0))
    v["eps2"] = v["c0"] / 8.0
    v["eps3"] = v["c0"] * _num((alpha - lam) / 24.0)
    v["D1_theta"] = d_one(c4, m, theta, p)
    v["D2_theta"] = d_two(c3, m, theta, p)
    v["D1_theta_tilde"] = d_one(c4, m, theta_t, p)
    v["D2_theta_tilde"] = d_two(c3, m, theta_t, p)

    v["G1"] = K2 ** ((alpha * (1.0 - a) - 1.0 + lam + a) / alpha)
    v["G2"] = K4 ** ((1.0 - r1) / r1)
    v["G3"] = K1 ** (1.0 + book.mu1 / alpha)
    v["G5"] = K6 ** (1.0 + book.mu1_tilde / alpha)
    v["Phi1"] = v["G1"] ** theta * v["G3"] ** (1.0 - theta)
    v["Phi2"] = v["G2"] ** (theta / (1.0 - theta)) * v["G3"]
    v["Phi3"] = v["Phi1"]
    v["Phi4"] = v["Phi2"]
    v["Phi6"] = v["G1"] ** theta_t * v["G5"] ** (1.0 - theta_t)
    v["Phi7"] = v["G2"] ** (theta_t / (1.0 - theta_t)) * v["G5"]

    v["Z1"] = log_max(
        [
            v["D1_theta"] * v["Phi1"],
            v["eps2"] ** (-theta / (1.0 - theta)) * v["D2_theta"] * v["Phi2"],
        ]
    )
    v["Z2"] = K3 ** ((lam + 1.0) / alpha)
    trace_base = _num(c6 * (alpha + r))
    eps3 = v["eps3"]
    v["Z3"] = log_max(
        [
            _num(c5) * v["D1_theta"] * v["Phi3"],
            eps3 ** (-theta / (1.0 - theta))
            * _num(c5) ** (1.0 / (1.0 - theta))
            * v["D2_theta"]
            * v["Phi4"],
            eps3 ** (-1.0 / (1.0 - a))
            * trace_base ** (p / (1.0 - a))
            * v["D1_theta_tilde"]
            * v["Phi6"],
            eps3 ** (-(1.0 / (1.0 - a) + p / (1.0 - a) * theta_t / (1.0 - theta_t)))
            * trace_base ** (p / ((1.0 - a) * (1.0 - theta_t)))
            * v["D2_theta_tilde"]
            * v["Phi7"],
        ]
    )
    gap = _num(alpha - lam)
    v["Z4"] = (
        2 * (gap * v["Z1"] + v["Z3"]) + 0.5 * gap * v["Z2"] + 2 * v["Z3"]
    )
    v["Zstar"] = _num(alpha / lam) * log_max([ONE, v["Z4"], v["C2"] * gap * K5])

    v["C1_tilde"] = 2 * v["C1"]
    p3 = book.p.p3
    v["c10"] = 20 * log_max(
        [
            v["C1_tilde"],
            _num(4.0 * lam),
            _num(c5) ** (1.0 / p3),
            (4 * _num(2.0 * c6 * p3) ** p) ** (1.0 / (p3 * p - 1.0)),
        ]
    )
    v["c8"] = v["c10"] / lam
    v["c9"] = 8 * v["c10"]
    rs = book.r_star
    v["c11"] = (
        _num(2.0) ** (4.0 + rs)
        * log_max([ONE, _num(consts.c7) ** p])
        * log_max([v["c8"], v["c9"]]) ** (1.0 + rs / 2.0)
    )
    proof = ProofConstants(alpha, r, r1, cz, v, consts)
    if book.moser is not None:
        proof = with_chat(book, proof)
    logger.info(
        "Z* = 10^%.6g (Z4 = 10^%.6g, alpha=%g, C_Z=%g)",
        v["Zstar"].log10,
        v["Z4"].log10,
        alpha,
        cz,
    )
    return proof


def with_chat(book: ExponentBook, proof: ProofConstants) -> ProofConstants:
    """Attach Chat0..Chat2, which need the Moser products of the book."""
    if book.moser is None:
        raise ConfigError("Chat constants need moser_products first", _BOUNDS)
    mp = book.moser
    a, rs = book.a, book.r_star
    v = dict(proof.values)
    base = (
        _num(2.0) ** (2.0 + rs / 2.0)
        * v["c11"]
        * _num(book.beta1) ** (3.0 * (3.0 - 2.0 * a) / (2.0 * (1.0 - a)))
    )
    v["Chat0"] = base**mp.omega
    v["Chat1"] = _num(2.0) ** mp.omega2 * v["Chat0"]
    v["Chat2"] = _num(2.0) ** (mp.nu_tilde / book.beta1) * v["Chat1"]
    return replace(proof, values=v)


def moser_amplitude(
    proof: ProofConstants,
    book: ExponentBook,
    integrals: DataIntegrals,
    T: float,
    sigma: float,
) -> LogNumber:
    """A_{T,sigma,alpha0}, the per-level amplitude of the Moser recursion."""
    a, rs = book.a, book.r_star
    if not 0 < sigma < 1 or not T > 0:
        raise ConfigError(
            f"need T > 0 and 0 < sigma < 1 (T={T}, sigma={sigma})", _BOUNDS
        )
    return (
        proof["c11"]
        * _num(2.0) ** (1.0 + rs / 2.0)
        * _num(1.0 + T) ** (2.0 + rs / 2.0)
        * _num(1.0 + 1.0 / (sigma * T)) ** (1.0 + rs / 2.0)
        * _num(book.beta1) ** (3.0 * (3.0 - 2.0 * a) / (2.0 * (1.0 - a)))
        * integrals.N1 ** (2.0 + rs / 2.0)
        * integrals.N3
        * integrals.Psi_T ** (1.0 + rs / 2.0)
    )


def embedding_from_mapping(
    values: Dict[str, float], provenance: str = "config"
) -> EmbeddingConstants:
    missing = [k for k in ("c1", "c2", "c3", "c4", "c5", "c6", "c7") if k not in values]
    if missing:
        raise ConfigError(f"[bounds.constants] is missing {missing}", _BOUNDS)
    extra = set(values) - {"c1", "c2", "c3", "c4", "c5", "c6", "c7"}
    if extra:
        raise ConfigError(f"unknown embedding constants {sorted(extra)}", _BOUNDS)
    return EmbeddingConstants(
        **{k: float(x) for k, x in values.items()}, provenance=provenance
    )
