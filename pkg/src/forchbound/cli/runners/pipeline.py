"""Command bodies: load a scenario file, run a subsystem, write its outputs.

Every runner returns a RunOutcome; the click layer only maps it to the
console and an exit code. Errors propagate as ForchboundError.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from ...bounds.constants import embedding_from_mapping
from ...bounds.exponents import default_r1
from ...bounds.gas import COLUMNS as GAS_COLUMNS
from ...bounds.gas import GasTable, example_gas_tables
from ...bounds.pipeline import (
    BOUNDS_COLUMNS,
    BoundsRun,
    embedding_source,
    run_bounds,
)
from ...bounds.verify import MARGIN_COLUMNS as BOUND_MARGIN_COLUMNS
from ...bounds.verify import (
    SABOTAGE_DIVISOR,
    MarginReport,
    verify_solution_against_bounds,
)
from ...core.fields import write_field_csv
from ...core.log import get_logger
from ...core.reporting import write_csv, write_json, write_margins_csv
from ...harness.calibrate import EmbeddingConstants, calibrate_constants
from ...harness.family import TestFunctionFamily
from ...harness.suite import (
    ParameterSet,
    build_parameter_grid,
    default_parameter_grid,
    run_suite,
)
from ...models.weights import compute_weights
from ...solver.diagnostics import (
    MassBalanceReport,
    flux_antisymmetry_check,
    mass_balance_report,
    monotonicity_check,
)
from ...solver.fv import SolutionTrace, solve
from ...solver.scenario import Scenario, build_grid, build_scenario, scenario_lambda
from ...types.runconfig import RunConfig, config_hash, load_config

logger = get_logger(__name__)

PathLike = Union[str, Path]

TRACE_COLUMNS = (
    "t",
    "dt",
    "picard_iterations",
    "halvings",
    "mass",
    "outflow",
    "clamped_cells",
)
MASS_COLUMNS = ("t", "dt", "residual", "source", "clamped_rate", "defect", "pass")


@dataclass
class RunOutcome:
    exit_code: int
    summary: Dict[str, object] = field(default_factory=dict)
    outputs: List[Path] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)


@dataclass(frozen=True)
class LoadedRun:
    cfg: RunConfig
    base_dir: Path
    out_dir: Path
    meta: Dict[str, object]


def load_run(config_path: PathLike, out_dir: Optional[PathLike] = None) -> LoadedRun:
    path = Path(config_path)
    cfg = load_config(path)
    out = Path(out_dir) if out_dir is not None else Path(cfg.output.directory)
    meta: Dict[str, object] = {
        "config_hash": config_hash(cfg),
        "seed": cfg.harness.seed,
    }
    return LoadedRun(cfg, path.parent, out, meta)


def _family(cfg: RunConfig) -> TestFunctionFamily:
    h = cfg.harness
    return TestFunctionFamily(
        seed=h.seed,
        count=h.count,
        max_frequency=h.max_frequency,
        decay=h.decay,
        include_constant=h.include_constant,
        include_linear=h.include_linear,
        include_bump=h.include_bump,
    )


# solver outputs


def _trace_rows(trace: SolutionTrace) -> Tuple[List[str], List[Tuple[object, ...]]]:
    alphas = sorted(trace.energies)
    columns = list(TRACE_COLUMNS) + [f"energy_{a:g}" for a in alphas]
    times = trace.mass.times
    rows: List[Tuple[object, ...]] = []
    for k, t in enumerate(times):
        rec = trace.steps[k - 1] if k > 0 else None
        rows.append(
            (
                float(t),
                rec.dt if rec else 0.0,
                rec.picard_iterations if rec else 0,
                rec.halvings if rec else 0,
                float(trace.mass.values[k]),
                rec.outflow if rec else 0.0,
                rec.clamped_cells if rec else 0,
                *(float(trace.energies[a].values[k]) for a in alphas),
            )
        )
    return columns, rows


def _mass_rows(report: MassBalanceReport) -> List[Tuple[object, ...]]:
    return [
        (r.t, r.dt, r.residual, r.source, r.clamped_rate, r.defect, r.passed)
        for r in report.rows
    ]


def _write_solution(
    run: LoadedRun, trace: SolutionTrace, mass: MassBalanceReport
) -> List[Path]:
    columns, rows = _trace_rows(trace)
    out = [
        write_csv(run.out_dir / "trace.csv", columns, rows, run.meta),
        write_csv(
            run.out_dir / "mass_residuals.csv", MASS_COLUMNS, _mass_rows(mass), run.meta
        ),
    ]
    if run.cfg.output.write_fields:
        for k, snap in enumerate(trace.snapshots):
            out.append(
                write_field_csv(snap, run.out_dir / "fields" / f"u_{k:04d}.csv")
            )
    return out


def _solve_scenario(
    run: LoadedRun, scenario: Scenario, extra_alphas: Tuple[float, ...] = ()
) -> Tuple[SolutionTrace, MassBalanceReport, Dict[str, object]]:
    antisymmetry = flux_antisymmetry_check(scenario.grid, run.cfg.harness.seed)
    if not antisymmetry.passed:
        logger.warning(
            "flux antisymmetry check failed: %d pair errors, divergence %.3e vs "
            "boundary flux %.3e",
            antisymmetry.pair_errors,
            antisymmetry.total_divergence,
            antisymmetry.boundary_flux,
        )
    config = run.cfg.solver_config()
    alphas = tuple(sorted(set(config.alpha_list) | set(extra_alphas)))
    trace = solve(scenario, config, alphas)
    mass = mass_balance_report(trace, scenario)
    diag: Dict[str, object] = {
        "antisymmetry": antisymmetry,
        "mass_balance_passed": mass.passed,
        "clamped_mass": mass.clamped_mass,
    }
    if scenario.cz == 0 and scenario.psi.min() >= 0:
        diag["monotonicity"] = [monotonicity_check(trace, a) for a in alphas]
    else:
        diag["monotonicity"] = "skipped: needs psi >= 0 and C_Z = 0"
    return trace, mass, diag


def run_solve(config_path: PathLike, out_dir: Optional[PathLike] = None) -> RunOutcome:
    run = load_run(config_path, out_dir)
    scenario = build_scenario(run.cfg, run.base_dir)
    trace, mass, diag = _solve_scenario(run, scenario)
    outputs = _write_solution(run, trace, mass)
    summary = {**trace.summary(), **diag}
    outputs.append(
        write_json(
            run.out_dir / "report.json",
            {**run.meta, "scenario": scenario.describe(), "solve": summary},
        )
    )
    return RunOutcome(0, summary, outputs)


# bounds outputs


def _bounds_for(
    run: LoadedRun, scenario: Scenario, cross_check: bool, oracle: bool
) -> BoundsRun:
    section = run.cfg.bounds
    if oracle and not section.oracle:
        section = section.model_copy(update={"oracle": True})
    source = embedding_source(
        section, run.cfg.harness, scenario.grid, 2.0 - scenario.degeneracy
    )
    return run_bounds(scenario, section, source, cross_check=cross_check)


def _bounds_summary(result: BoundsRun) -> Dict[str, object]:
    report = result.report
    return {
        "r_star": result.book.r_star,
        "mu_max": result.book.mu_max,
        "Zstar": result.proof.zstar,
        "T_threshold": report.T_threshold,
        "T": report.T,
        "delta_T": report.delta_T,
        "certified": report.certified,
        "Linf_bound": report.linf_bound,
        "Psi_T": result.integrals.Psi_T,
    }


def run_bounds_command(
    config_path: PathLike,
    out_dir: Optional[PathLike] = None,
    oracle: bool = False,
    cross_check: bool = False,
) -> RunOutcome:
    run = load_run(config_path, out_dir)
    scenario = build_scenario(run.cfg, run.base_dir)
    result = _bounds_for(run, scenario, cross_check, oracle)
    outputs = [
        write_json(run.out_dir / "report.json", {**run.meta, **result.to_dict()}),
        write_csv(
            run.out_dir / "bounds.csv", BOUNDS_COLUMNS, result.bounds_rows(), run.meta
        ),
    ]
    # admissibility failures raise before this point
    return RunOutcome(0, _bounds_summary(result), outputs, list(result.report.notes))


def _margin_rows(margins: MarginReport) -> List[Tuple[object, ...]]:
    return [row.as_row() for row in margins.rows]


def run_verify(
    config_path: PathLike,
    out_dir: Optional[PathLike] = None,
    sabotage: bool = False,
) -> RunOutcome:
    """Bounds first; the solver then runs to the bound horizon T and every
    snapshot is checked against V(t) and the L^infinity bound."""
    run = load_run(config_path, out_dir)
    scenario = build_scenario(run.cfg, run.base_dir)
    result = _bounds_for(run, scenario, cross_check=True, oracle=False)
    report = result.report
    outputs = [
        write_csv(
            run.out_dir / "bounds.csv", BOUNDS_COLUMNS, result.bounds_rows(), run.meta
        )
    ]
    payload: Dict[str, object] = {**run.meta, **result.to_dict()}
    summary = _bounds_summary(result)
    if not report.certified:
        note = (
            f"T = {report.T:g} is not below T_threshold = {report.T_threshold:g}; "
            "nothing to verify"
        )
        payload["verification"] = {"passed": False, "certified": False, "note": note}
        outputs.append(write_json(run.out_dir / "report.json", payload))
        return RunOutcome(3, summary, outputs, list(report.notes) + [note])

    if report.T != scenario.t_final:
        scenario = scenario.with_horizon(report.T)
    trace, mass, diag = _solve_scenario(run, scenario, (result.book.beta1,))
    outputs += _write_solution(run, trace, mass)
    margins = verify_solution_against_bounds(
        trace,
        report,
        result.book,
        sabotage=SABOTAGE_DIVISOR if sabotage else None,
    )
    outputs.append(
        write_csv(
            run.out_dir / "margins.csv",
            BOUND_MARGIN_COLUMNS,
            _margin_rows(margins),
            run.meta,
        )
    )
    payload["solve"] = {**trace.summary(), **diag}
    payload["verification"] = margins.to_dict()
    outputs.append(write_json(run.out_dir / "report.json", payload))
    summary.update(
        passed=margins.passed,
        worst_ratio=margins.worst_ratio,
        checks=len(margins.rows),
    )
    return RunOutcome(
        0 if margins.passed else 3, summary, outputs, list(margins.notes)
    )


# harness outputs


def _harness_inputs(
    cfg: RunConfig, scenario: Scenario
) -> Tuple[float, float, float, List[ParameterSet]]:
    p = 2.0 - scenario.degeneracy
    s = scenario_lambda(cfg) + 1.0
    r1 = cfg.bounds.r1
    if r1 is None:
        r1 = default_r1(scenario.n, scenario.degeneracy)
    h = cfg.harness
    if h.rs is not None or h.alphas is not None or h.epsilons is not None:
        grid = build_parameter_grid(
            scenario.n,
            p,
            r1,
            s,
            h.rs or [1.0],
            h.alphas or [40.0],
            h.epsilons or [1.0],
        )
    else:
        grid = default_parameter_grid(scenario.n, p, r1, s)
    return p, s, r1, grid


def _calibrated(
    cfg: RunConfig, scenario: Scenario, r1: float, p: float
) -> EmbeddingConstants:
    if cfg.bounds.constants is not None:
        return embedding_from_mapping(cfg.bounds.constants)
    return calibrate_constants(
        scenario.grid, r1, p, _family(cfg), cfg.harness.safety_factor
    )


def run_calibrate(
    config_path: PathLike, out_dir: Optional[PathLike] = None
) -> RunOutcome:
    run = load_run(config_path, out_dir)
    scenario = build_scenario(run.cfg, run.base_dir)
    p, _, r1, _ = _harness_inputs(run.cfg, scenario)
    consts = calibrate_constants(
        scenario.grid, r1, p, _family(run.cfg), run.cfg.harness.safety_factor
    )
    outputs = [
        write_json(
            run.out_dir / "constants.json",
            {**run.meta, "r1": r1, "p": p, "constants": consts},
        )
    ]
    return RunOutcome(0, {"r1": r1, "p": p, **consts.to_dict()}, outputs)


def run_check_inequalities(
    config_path: PathLike,
    out_dir: Optional[PathLike] = None,
    sabotage: bool = False,
) -> RunOutcome:
    """Every harness check; exit 0 iff all records pass, 3 otherwise.

    An empty family needs no constants and passes with zero records.
    """
    run = load_run(config_path, out_dir)
    cfg = run.cfg
    grid = build_grid(cfg)
    family = _family(cfg)
    margins_path = run.out_dir / "margins.csv"
    if not family.members(grid.n):
        outputs = [
            write_margins_csv(margins_path, [], run.meta),
            write_json(
                run.out_dir / "report.json",
                {**run.meta, "records": 0, "passed": True},
            ),
        ]
        return RunOutcome(0, {"records": 0, "passed": True}, outputs)

    scenario = build_scenario(cfg, run.base_dir)
    p, _, r1, params = _harness_inputs(cfg, scenario)
    consts = _calibrated(cfg, scenario, r1, p)
    if sabotage:
        consts = consts.divided(SABOTAGE_DIVISOR)
    W = compute_weights(scenario.law).W1
    report = run_suite(
        grid, family, params, consts, scenario.phi, W, T=cfg.harness.T
    )
    outputs = [
        write_margins_csv(margins_path, report.records, run.meta),
        write_json(
            run.out_dir / "report.json",
            {
                **run.meta,
                "passed": report.passed,
                "records": len(report.records),
                "failures": len(report.failures),
                "worst_margin": report.worst_margin,
                "params": report.params,
                "warnings": report.warnings,
                "note": report.note,
            },
        ),
    ]
    summary = {
        "records": len(report.records),
        "failures": len(report.failures),
        "worst_margin": report.worst_margin,
        "passed": report.passed,
    }
    return RunOutcome(0 if report.passed else 3, summary, outputs, report.warnings)


def run_gas_example(
    n: int,
    out_dir: PathLike,
    r1: Optional[float] = None,
    alpha0: float = 40.0,
    r: float = 1.0,
    kappa_tilde: float = 1.03,
    alpha: Optional[float] = None,
) -> Tuple[RunOutcome, GasTable]:
    table = example_gas_tables(n, r1, alpha0, r, kappa_tilde, alpha)
    meta = {"n": n, "r1": table.r1, "alpha": table.alpha, "alpha0": alpha0}
    path = write_csv(
        Path(out_dir) / f"gas_n{n}.csv",
        GAS_COLUMNS,
        (row.as_row() for row in table.rows),
        meta,
    )
    code = 0 if not table.flagged else 3
    return RunOutcome(code, table.to_dict(), [path]), table
