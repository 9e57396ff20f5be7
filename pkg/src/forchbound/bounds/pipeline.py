"""The full bounds chain for one scenario, with an optional (r1, r) search."""

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Optional, Tuple

from ..core.grid import Grid
from ..core.log import get_logger
from ..core.lognum import LogNumber
from ..harness.calibrate import EmbeddingConstants, calibrate_constants
from ..harness.family import TestFunctionFamily
from ..models.base import Component, ConfigError, ForchboundError
from ..models.weights import compute_weights
from ..solver.scenario import Scenario
from ..types.runconfig import BoundsSection, HarnessSection
from .constants import ProofConstants, compute_Zstar, embedding_from_mapping
from .curves import BoundReport, alpha_bound_curve
from .exponents import ExponentBook, build_exponents, default_r, r1_interval
from .integrals import DataIntegrals, compute_data_integrals, u0_integrals
from .linfty import linfty_bound
from .moser import moser_products
from .recompute import straight_line_linf_log, straight_line_logs

logger = get_logger(__name__)

_BOUNDS = Component.BOUNDS.value

# r candidates for the search, as multiples of the default r
R_SCALES = (0.5, 0.75, 1.0, 1.5, 2.0)

EmbeddingSource = Callable[[float], EmbeddingConstants]

BOUNDS_COLUMNS = ("t", "V", "log_V", "L_beta_bound", "V_rk4")


@dataclass(frozen=True)
class SearchRow:
    r1: float
    r: float
    log_linf: Optional[float]
    certified: bool
    reason: str = ""

    def to_dict(self) -> Dict[str, object]:
        return {
            "r1": self.r1,
            "r": self.r,
            "log_Linf": self.log_linf,
            "certified": self.certified,
            "reason": self.reason,
        }


@dataclass(frozen=True)
class BoundsRun:
    """Everything the bounds chain produced for one scenario."""

    book: ExponentBook
    integrals: DataIntegrals
    proof: ProofConstants
    report: BoundReport
    V0: LogNumber
    u0_norm: LogNumber
    recompute: Dict[str, Optional[float]] = field(default_factory=dict)
    search: Tuple[SearchRow, ...] = ()
    scenario: str = ""

    @property
    def certified(self) -> bool:
        return self.report.certified

    def bounds_rows(self) -> List[Tuple[object, ...]]:
        """Rows of bounds.csv; absent optional columns are written as nan."""
        return [
            tuple(row.get(c, math.nan) for c in BOUNDS_COLUMNS)
            for row in self.report.curve_rows()
        ]

    def to_dict(self) -> Dict[str, object]:
        return {
            "scenario": self.scenario,
            "exponents": self.book.to_dict(),
            "integrals": self.integrals.to_dict(),
            "constants": self.proof.to_dict(),
            "bounds": self.report.to_dict(),
            "V0": self.V0,
            "u0_norm": self.u0_norm,
            "recompute": dict(self.recompute),
            "search": [row.to_dict() for row in self.search],
        }


def embedding_source(
    section: BoundsSection, harness: HarnessSection, grid: Grid, p: float
) -> EmbeddingSource:
    """Configured constants when [bounds.constants] is present, otherwise
    constants calibrated on the harness family, cached per r1."""
    if section.constants is not None:
        fixed = embedding_from_mapping(section.constants)
        return lambda r1: fixed
    family = TestFunctionFamily(
        seed=harness.seed,
        count=harness.count,
        max_frequency=harness.max_frequency,
        decay=harness.decay,
        include_constant=harness.include_constant,
        include_linear=harness.include_linear,
        include_bump=harness.include_bump,
    )
    cache: Dict[float, EmbeddingConstants] = {}

    def source(r1: float) -> EmbeddingConstants:
        if r1 not in cache:
            cache[r1] = calibrate_constants(
                grid, r1, p, family, harness.safety_factor
            )
        return cache[r1]

    return source


def _book(
    scenario: Scenario, section: BoundsSection, r1: Optional[float], r: Optional[float]
) -> ExponentBook:
    book = build_exponents(
        scenario.n,
        scenario.degeneracy,
        scenario.lam,
        r1,
        r,
        section.alpha0,
        section.kappa_tilde,
        section.p_overrides(),
        alpha=section.alpha,
    )
    return moser_products(book)


def _relative_gap(a: Optional[float], b: Optional[float]) -> Optional[float]:
    """|exp(a - b) - 1| for two logs, None when either is missing."""
    if a is None or b is None or not (math.isfinite(a) and math.isfinite(b)):
        return None
    return abs(math.expm1(a - b))


def _single(
    scenario: Scenario,
    section: BoundsSection,
    embedding: EmbeddingSource,
    r1: Optional[float],
    r: Optional[float],
    cross_check: bool,
    oracle: bool,
) -> BoundsRun:
    book = _book(scenario, section, r1, r)
    consts = embedding(book.r1)
    weights = compute_weights(scenario.law)
    aN = scenario.law.coefficients[-1]
    V0, u0_norm = u0_integrals(scenario.u0, scenario.phi, book.alpha)

    def chain(T: float) -> Tuple[DataIntegrals, ProofConstants, BoundReport]:
        integrals = compute_data_integrals(
            book, scenario.phi, weights, aN, scenario.psi, T
        )
        proof = compute_Zstar(book, integrals, scenario.cz, consts)
        report = alpha_bound_curve(
            book,
            proof,
            V0,
            integrals.M,
            T,
            beta=section.beta,
            phi=scenario.phi,
            points=section.curve_points,
            oracle=oracle,
        )
        return integrals, proof, report

    T = scenario.t_final
    integrals, proof, report = chain(T)
    if section.horizon_fraction is not None:
        T = section.horizon_fraction * report.T_threshold
        if not T > 0:
            raise ConfigError(
                f"horizon_fraction gives T = {T:g}; T_threshold underflows", _BOUNDS
            )
        logger.info(
            "horizon set to %g of T_threshold: T = %.6g",
            section.horizon_fraction,
            T,
        )
        integrals, proof, report = chain(T)

    recompute: Dict[str, Optional[float]] = {}
    logs = straight_line_logs(book, integrals, scenario.cz, consts)
    recompute["Zstar_rel_diff"] = _relative_gap(proof.zstar.log, logs["Zstar"])

    if book.alpha == book.beta1:
        eps = (
            section.epsilon_fraction * T
            if section.epsilon_fraction is not None
            else section.epsilon
        )
        report = linfty_bound(
            book,
            integrals,
            proof,
            report,
            T,
            eps,
            u0_norm.value,
            cross_check=cross_check,
        )
        if report.linf_bound is not None:
            line = straight_line_linf_log(
                book, logs, integrals, eps, T, report.delta_T, u0_norm.value
            )
            recompute["Linf_rel_diff"] = _relative_gap(report.linf_bound.log, line)
    else:
        note = (
            f"alpha = {book.alpha:g} differs from beta1 = {book.beta1:g}; "
            "no L^infinity bound"
        )
        report = replace(report, notes=report.notes + (note,))
        logger.info(note)

    return BoundsRun(
        book=book,
        integrals=integrals,
        proof=proof,
        report=report,
        V0=V0,
        u0_norm=u0_norm,
        recompute=recompute,
        scenario=scenario.describe(),
    )


def search_grid(
    scenario: Scenario, section: BoundsSection
) -> List[Tuple[float, float]]:
    """Interior r1 points of the admissible window crossed with scaled default r."""
    a, lam = scenario.degeneracy, scenario.lam
    lo, hi = r1_interval(scenario.n, a)
    k = section.optimize_points
    r1s = [lo + (hi - lo) * (i + 1) / (k + 1) for i in range(k)]
    r_floor = max(0.0, lam * (3.0 - 2.0 * a) - 1.0)
    base = default_r(lam, a) if section.r is None else section.r
    rs = sorted({base * s for s in R_SCALES if base * s > r_floor})
    return [(float(r1), float(r)) for r1 in r1s for r in rs]


def run_bounds(
    scenario: Scenario,
    section: BoundsSection,
    embedding: EmbeddingSource,
    cross_check: bool = False,
) -> BoundsRun:
    """Exponents, Moser products, data integrals, Z*, the L^alpha curve and,
    for alpha = beta1, the L^infinity bound.

    With ``section.optimize`` the chain runs on every admissible (r1, r) of
    the search grid and the smallest certified L^infinity bound wins; equal
    bounds go to the lexicographically smaller tuple.
    """
    oracle = section.oracle
    if not section.optimize:
        return _single(
            scenario, section, embedding, section.r1, section.r, cross_check, oracle
        )

    rows: List[SearchRow] = []
    for r1, r in search_grid(scenario, section):
        try:
            run = _single(scenario, section, embedding, r1, r, False, False)
        except ForchboundError as e:
            rows.append(SearchRow(r1, r, None, False, e.message))
            continue
        linf = run.report.linf_bound
        rows.append(
            SearchRow(r1, r, None if linf is None else linf.log, run.certified)
        )
    scored = [row for row in rows if row.certified and row.log_linf is not None]
    if not scored:
        raise ConfigError(
            f"no (r1, r) in the search grid of {len(rows)} tuples gives a "
            "certified L^infinity bound",
            _BOUNDS,
        )
    best = min(scored, key=lambda row: (row.log_linf, row.r1, row.r))
    logger.info(
        "search over %d tuples: r1=%.6g r=%.6g gives L^infinity 10^%.6g",
        len(rows),
        best.r1,
        best.r,
        (best.log_linf or 0.0) / math.log(10.0),
    )
    run = _single(scenario, section, embedding, best.r1, best.r, cross_check, oracle)
    return replace(run, search=tuple(rows))
