"""Post-run checks of a SolutionTrace: mass identity, energy decay, flux pairing
and the observed order on a manufactured solution."""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..core.grid import BoundaryField, Grid, SpatialField, TimeSeries
from ..core.log import get_logger
from ..core.quadrature import (
    boundary_normal_flux,
    discrete_divergence,
    integrate_boundary,
    integrate_volume,
)
from ..models.base import Component, ConfigError, SolverError
from ..models.forchheimer import ForchheimerLaw
from ..types.common import FloatArray
from ..types.runconfig import SolverConfig
from .fv import SolutionTrace, solve, weighted_power
from .scenario import Scenario

logger = get_logger(__name__)

_SOLVER = Component.SOLVER.value

MASS_TOLERANCE = 1e-10
MONOTONE_SLACK = 1e-10
ANTISYMMETRY_TOLERANCE = 1e-12


@dataclass(frozen=True)
class MassBalanceRow:
    t: float
    dt: float
    residual: float  # dM/dt + outflow
    source: float
    clamped_rate: float  # clamped mass / dt
    defect: float  # residual - source - clamped_rate
    scale: float
    passed: bool


@dataclass(frozen=True)
class MassBalanceReport:
    rows: Tuple[MassBalanceRow, ...]
    residual: TimeSeries
    clamped_mass: float

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    @property
    def worst(self) -> Optional[MassBalanceRow]:
        if not self.rows:
            return None
        return max(self.rows, key=lambda r: abs(r.defect) / r.scale)


def mass_balance_report(
    trace: SolutionTrace, scenario: Optional[Scenario] = None
) -> MassBalanceReport:
    """residual_k = [M(t_{k+1}) - M(t_k)] / dt + int_G psi u^lam, M = int phi u^lam.

    Without source or clamping the residual vanishes up to rounding and the
    Picard tolerance. A row passes when the defect is within 1e-10 of
    1 + the magnitudes of the terms (M/dt, outflow, source, clamped/dt).
    """
    if scenario is not None and scenario is not trace.scenario:
        if scenario.grid != trace.scenario.grid:
            raise SolverError("trace was produced on a different grid", _SOLVER)
    m = trace.mass.values
    rows: List[MassBalanceRow] = []
    for k, rec in enumerate(trace.steps):
        dm = (m[k + 1] - m[k]) / rec.dt
        residual = dm + rec.outflow
        clamped_rate = rec.clamped_mass / rec.dt
        defect = residual - rec.source - clamped_rate
        scale = 1.0 + abs(m[k]) / rec.dt + abs(rec.outflow) + abs(rec.source)
        scale += abs(clamped_rate)
        rows.append(
            MassBalanceRow(
                rec.t,
                rec.dt,
                residual,
                rec.source,
                clamped_rate,
                defect,
                scale,
                abs(defect) <= MASS_TOLERANCE * scale,
            )
        )
    series = TimeSeries.from_lists(
        [r.t for r in rows], [r.residual for r in rows], "mass_residual"
    )
    report = MassBalanceReport(
        tuple(rows), series, sum(s.clamped_mass for s in trace.steps)
    )
    if not report.passed and report.worst is not None:
        logger.warning(
            "mass identity defect %.3e at t=%.6g", report.worst.defect, report.worst.t
        )
    return report


@dataclass(frozen=True)
class MonotonicityReport:
    alpha: float
    passed: bool
    worst_increase: float  # relative, <= 0 when nothing increased
    worst_time: float
    samples: int


def monotonicity_check(trace: SolutionTrace, alpha: float) -> MonotonicityReport:
    """int phi u^alpha must not increase (relative slack 1e-10).

    Valid only for psi >= 0 and C_Z = 0, where both dissipation terms have a
    sign. Uses the per-step series when alpha was recorded, else snapshots.
    """
    sc = trace.scenario
    if sc.cz != 0 or sc.psi.min() < 0:
        raise ConfigError(
            "monotonicity needs psi >= 0 and C_Z = 0 "
            f"(psi min {sc.psi.min():g}, C_Z {sc.cz:g})",
            _SOLVER,
        )
    if alpha in trace.energies:
        times = trace.energies[alpha].times
        values = trace.energies[alpha].values
    else:
        times = np.asarray(trace.snapshot_times)
        values = np.array(
            [weighted_power(sc, s.values, alpha) for s in trace.snapshots]
        )
    worst, worst_t = -math.inf, float(times[0]) if len(times) else 0.0
    passed = True
    for k in range(1, len(values)):
        prev = values[k - 1]
        rise = values[k] - prev
        rel = rise / prev if prev > 0 else (math.inf if rise > 0 else 0.0)
        if rel > worst:
            worst, worst_t = rel, float(times[k])
        if rise > MONOTONE_SLACK * abs(prev):
            passed = False
    if not passed:
        logger.warning(
            "int phi u^%g increased by %.3e (relative) at t=%.6g", alpha, worst, worst_t
        )
    return MonotonicityReport(alpha, passed, worst, worst_t, len(values))


@dataclass(frozen=True)
class AntisymmetryReport:
    passed: bool
    total_divergence: float
    boundary_flux: float
    pair_errors: int


def flux_antisymmetry_check(grid: Grid, seed: int = 0) -> AntisymmetryReport:
    """Random face fluxes: sum of div F dV equals the outward boundary flux,
    and a single interior face feeds its two cells with opposite signs."""
    rng = np.random.default_rng(seed)
    fluxes = [rng.standard_normal(grid.face_shape(k)) for k in range(grid.n)]
    div = discrete_divergence(grid, fluxes)
    total = integrate_volume(grid, div)
    boundary = integrate_boundary(grid, boundary_normal_flux(grid, fluxes))
    scale = sum(
        float(np.sum(np.abs(f))) * grid.face_area(k) for k, f in enumerate(fluxes)
    )
    ok = abs(total - boundary) <= ANTISYMMETRY_TOLERANCE * max(scale, 1.0)

    pair_errors = 0
    for k in range(grid.n):
        if grid.cells[k] < 2:
            continue
        unit_flux = [np.zeros(grid.face_shape(j)) for j in range(grid.n)]
        idx = [0] * grid.n
        idx[k] = 1
        unit_flux[k][tuple(idx)] = 1.0
        d = discrete_divergence(grid, unit_flux) * grid.h[k]
        left = [0] * grid.n
        right = [0] * grid.n
        right[k] = 1
        if not (
            math.isclose(d[tuple(left)], 1.0, rel_tol=1e-14)
            and math.isclose(d[tuple(right)], -1.0, rel_tol=1e-14)
        ):
            pair_errors += 1
        if np.count_nonzero(d) != 2:
            pair_errors += 1
    return AntisymmetryReport(ok and pair_errors == 0, total, boundary, pair_errors)


# manufactured solution u*(x, t) = 1 + t x (1 - x) on [0, 1]

MMS_PHI = 10.0
MMS_LAMBDA = 0.5
MMS_T_FINAL = 0.05
MMS_PSI_SAMPLES = 2001
# dt = MMS_DT_SCALE h^2, so the time error shrinks with the grid
MMS_DT_SCALE = 0.2


def mms_exact(x: FloatArray, t: float) -> FloatArray:
    return 1.0 + t * x * (1.0 - x)


def _law_slope(law: ForchheimerLaw, s: FloatArray) -> FloatArray:
    """d(s g(s))/ds = sum_i a_i (alpha_i + 1) s^alpha_i, cell by cell."""
    coef = law.coefficient_matrix()
    slope = np.zeros_like(s)
    for a_i, e_i in zip(coef, law.exponents):
        slope = slope + a_i * (e_i + 1.0) * (s**e_i if e_i else 1.0)
    return slope


def manufactured_scenario(
    cells: int,
    a: float = 1.0,
    b: float = 1.0,
    t_final: float = MMS_T_FINAL,
    phi: float = MMS_PHI,
    lam: float = MMS_LAMBDA,
) -> Scenario:
    """1-D two-term problem whose exact solution is u*(x, t) = 1 + t x(1-x).

    In 1-D X(y) = sign(y) s(|y|), so the wall flux is s(t) on both ends. The
    solver takes the Robin flux psi w from the boundary cell, so the data is
    psi(t) = s(t) / w*(h/2, t) with w* = u*^lam. The source is
    phi lam u*^{lam-1} x(1-x) + 2t / (sg)'(s(t|1-2x|)).
    """
    grid = Grid(1, (cells,), ((0.0, 1.0),))
    law = ForchheimerLaw(
        (0.0, 1.0),
        (SpatialField.constant(grid, a, "a_0"), SpatialField.constant(grid, b, "a_1")),
        "two_term",
    )
    x = grid.centers()[0]
    site = law.cell_site(0)
    times = np.linspace(0.0, t_final, MMS_PSI_SAMPLES)
    s_t = site.s_values(times)
    x_c = 0.5 * grid.h[0]
    w_c = (1.0 + times * x_c * (1.0 - x_c)) ** lam
    psi = BoundaryField(grid, np.outer(s_t / w_c, np.ones(2)), tuple(times), "psi_mms")
    sites = law.sites()

    def source(t: float) -> FloatArray:
        u = mms_exact(x, t)
        s = sites.s_values(t * np.abs(1.0 - 2.0 * x))
        return phi * lam * u ** (lam - 1.0) * x * (1.0 - x) + 2.0 * t / _law_slope(
            law, s
        )

    return Scenario(
        grid,
        law,
        SpatialField.constant(grid, phi, "phi"),
        lam,
        psi,
        SpatialField.constant(grid, 1.0, "u0"),
        t_final,
        source=source,
        name=f"manufactured-{cells}",
    )


def mms_solver_config(cells: int) -> SolverConfig:
    dt = MMS_DT_SCALE / cells**2
    return SolverConfig(
        dt_initial=dt,
        dt_min=1e-6 * dt,
        dt_max=dt,
        picard_tol=1e-12,
        picard_max=80,
        output_every=1_000_000,
        alpha_list=[],
    )


@dataclass(frozen=True)
class OrderReport:
    resolutions: Tuple[int, ...]
    errors: Tuple[float, ...]
    order: float
    traces: Dict[int, SolutionTrace] = field(default_factory=dict, compare=False)

    def to_dict(self) -> Dict[str, object]:
        return {
            "resolutions": list(self.resolutions),
            "errors": list(self.errors),
            "order": self.order,
        }


def manufactured_order(
    resolutions: Sequence[int] = (32, 128),
    t_final: float = MMS_T_FINAL,
    config: Optional[SolverConfig] = None,
) -> OrderReport:
    """Observed spatial order log(e_coarse / e_fine) / log(N_fine / N_coarse).

    Errors are L2 norms of u - u* at t_final over cell centers. Without a
    ``config`` each resolution runs with dt proportional to h^2.
    """
    if len(resolutions) != 2 or resolutions[0] >= resolutions[1]:
        raise ConfigError("need two increasing resolutions", _SOLVER)
    errors = []
    traces = {}
    for cells in resolutions:
        sc = manufactured_scenario(cells, t_final=t_final)
        trace = solve(sc, config or mms_solver_config(cells), [])
        exact = mms_exact(sc.grid.centers()[0], trace.snapshot_times[-1])
        err = math.sqrt(integrate_volume(sc.grid, (trace.final.values - exact) ** 2))
        errors.append(err)
        traces[cells] = trace
        logger.info("manufactured solution at %d cells: L2 error %.3e", cells, err)
    ratio = resolutions[1] / resolutions[0]
    order = math.log(errors[0] / errors[1]) / math.log(ratio)
    return OrderReport(tuple(resolutions), tuple(errors), order, traces)
