"""Run every inequality check over a family and a parameter grid."""

import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..core.grid import Grid, SpatialField
from ..core.log import get_logger
from ..core.reporting import write_margins_csv
from ..models.base import AdmissibilityError, Component, ForchboundError
from .calibrate import EmbeddingConstants
from .checks import (
    CheckReport,
    check_parabolic_sobolev,
    check_trace_simple,
    check_trace_two_weight,
    check_weighted_sobolev,
)
from .family import Sample, TestFunctionFamily
from .params import SobolevParams

logger = get_logger(__name__)

_HARNESS = Component.HARNESS.value

# (r, alpha) pairs crossed with these epsilons, plus one small-epsilon case
DEFAULT_EXPONENTS = ((1.0, 30.0), (1.0, 40.0), (0.5, 20.0))
DEFAULT_EPSILONS = (0.1, 1.0, 10.0)
EXTRA_CASE = (1.0, 40.0, 0.01)

TIME_SAMPLES = 11
TIME_AMPLITUDE = 0.1


@dataclass(frozen=True)
class ParameterSet:
    param_id: str
    params: SobolevParams


def param_id(params: SobolevParams) -> str:
    return f"r{params.r:g}-a{params.alpha:g}-e{params.epsilon:g}"


def default_parameter_grid(
    n: int = 2, p: float = 1.5, r1: float = 2.0 / 3.0, s: float = 1.5
) -> List[ParameterSet]:
    """Ten admissible sets around the ideal-gas exponents p = s = 3/2."""
    cases = [(r, a, e) for r, a in DEFAULT_EXPONENTS for e in DEFAULT_EPSILONS]
    cases.append(EXTRA_CASE)
    out = []
    for r, alpha, eps in cases:
        params = SobolevParams(n, p, r1, s, r, alpha, eps)
        out.append(ParameterSet(param_id(params), params))
    return out


def build_parameter_grid(
    n: int,
    p: float,
    r1: float,
    s: float,
    rs: Sequence[float],
    alphas: Sequence[float],
    epsilons: Sequence[float],
) -> List[ParameterSet]:
    """Cartesian grid; the first inadmissible set aborts with its diagnostic."""
    out = []
    for r in rs:
        for alpha in alphas:
            for eps in epsilons:
                try:
                    params = SobolevParams(n, p, r1, s, r, alpha, eps)
                except AdmissibilityError as e:
                    raise AdmissibilityError(
                        f"parameter set r={r} alpha={alpha} epsilon={eps}: {e.message}",
                        _HARNESS,
                        e.condition,
                        e,
                    ) from e
                out.append(ParameterSet(param_id(params), params))
    return out


def time_varying_samples(
    base: Sample, T: float, count: int = TIME_SAMPLES
) -> List[Tuple[float, Sample]]:
    """u(x, t) = 1 + 0.1 sin(2 pi t) f(x) on ``count`` equispaced times."""
    times = np.linspace(0.0, T, count)
    return [
        (float(t), base.scaled(TIME_AMPLITUDE * math.sin(2.0 * math.pi * t), 1.0))
        for t in times
    ]


def run_suite(
    grid: Grid,
    family: TestFunctionFamily,
    parameter_grid: Sequence[ParameterSet],
    consts: EmbeddingConstants,
    phi: SpatialField,
    W: SpatialField,
    omega: Optional[SpatialField] = None,
    T: float = 1.0,
    margins_path: Optional[Path] = None,
) -> CheckReport:
    """Every check on every (function, parameter) pair, records sorted.

    trace_simple runs twice per set: at the set's alpha and at the smallest
    admissible alpha = max(s, (p-s)/(p-1)). An empty family passes vacuously.
    """
    omega = phi if omega is None else omega
    members = family.members(grid.n)
    samples = [(m.function_id, m.sample(grid)) for m in members]
    report = CheckReport(
        "suite",
        params={
            "family": family.describe(),
            "constants": consts.to_dict(),
            "parameter_sets": {ps.param_id: ps.params.echo() for ps in parameter_grid},
            "T": T,
        },
        resolution=grid.cells,
    )
    logger.info(
        "suite: %d functions x %d parameter sets on %s",
        len(samples),
        len(parameter_grid),
        grid.describe(),
    )
    for ps in parameter_grid:
        pr = ps.params
        alpha_min = max(pr.s, (pr.p - pr.s) / (pr.p - 1.0))
        for fid, sample in samples:
            try:
                report.extend(
                    check_weighted_sobolev(
                        sample, omega, phi, W, pr, consts, fid, ps.param_id
                    )
                )
                for alpha, pid in (
                    (pr.alpha, ps.param_id),
                    (alpha_min, f"{ps.param_id}@alpha_min"),
                ):
                    report.extend(
                        check_trace_simple(
                            sample, W, alpha, pr.s, pr.p, pr.epsilon, consts, fid, pid
                        )
                    )
                report.extend(
                    check_trace_two_weight(sample, phi, W, pr, consts, fid, ps.param_id)
                )
                report.extend(
                    check_parabolic_sobolev(
                        time_varying_samples(sample, T),
                        phi,
                        W,
                        pr,
                        consts,
                        T,
                        fid,
                        ps.param_id,
                    )
                )
            except ForchboundError as e:
                e.message = f"{fid} at {ps.param_id}: {e.message}"
                raise
    report = report.sorted()
    failures = report.failures
    if failures:
        worst = min(failures, key=lambda r: r.margin)
        logger.warning(
            "suite: %d of %d records failed; worst %s %s at %s (margin %.6g)",
            len(failures),
            len(report.records),
            worst.check_name,
            worst.function_id,
            worst.param_id,
            worst.margin,
        )
    else:
        logger.info("suite: all %d records pass", len(report.records))
    if margins_path is not None:
        write_margins_csv(margins_path, report.records)
    return report
