"""Family-relative calibration of the embedding constants c1..c7.

The constants of the classical embedding and trace theorems exist but are
never known numerically. Calibration fits them to a test-function family and
multiplies by a safety factor; a later check failure indicts these values,
not the inequality.
"""

from dataclasses import asdict, dataclass, replace
from typing import Dict, List, Optional

import numpy as np

from ..config import get_settings
from ..core.grid import Grid
from ..core.log import get_logger
from ..core.quadrature import integrate_boundary, integrate_volume
from ..models.base import AdmissibilityError, Component, DegenerateFamilyError
from .family import FamilyMember, Sample, TestFunctionFamily
from .params import r1_violation

logger = get_logger(__name__)

_HARNESS = Component.HARNESS.value
_NAMES = ("c1", "c2", "c3", "c4", "c5", "c6", "c7")


@dataclass(frozen=True)
class EmbeddingConstants:
    c1: float  # interpolation Sobolev at p
    c2: float
    c3: float  # same at r1 p
    c4: float
    c5: float  # trace, zero-gradient part
    c6: float  # trace, gradient part
    c7: float  # standard Sobolev at r1 p
    safety_factor: float = 1.0
    provenance: str = "user-supplied"
    seed: Optional[int] = None
    family: str = ""

    def __post_init__(self) -> None:
        for name in _NAMES:
            if not getattr(self, name) > 0:
                raise AdmissibilityError(
                    f"embedding constant {name} must be positive",
                    _HARNESS,
                    f"{name} > 0",
                )

    def divided(self, divisor: float) -> "EmbeddingConstants":
        """Every constant divided by ``divisor``; used to sabotage a suite."""
        scaled = {k: getattr(self, k) / divisor for k in _NAMES}
        return replace(
            self,
            **scaled,
            provenance=f"{self.provenance}/sabotaged:{divisor:g}",
        )

    def to_dict(self) -> Dict[str, object]:
        return asdict(self)


def _lp(grid: Grid, values: np.ndarray, q: float) -> float:
    return integrate_volume(grid, np.abs(values) ** q) ** (1.0 / q)


def _grad_norm(sample: Sample) -> np.ndarray:
    return np.sqrt(np.sum(np.asarray(sample.gradient) ** 2, axis=0))


def _sobolev_conjugate(n: int, q: float) -> float:
    return n * q / (n - q)


@dataclass(frozen=True)
class _Ratios:
    zero_grad: float  # max over constant members
    residual: float  # max residual over members with a gradient


def _interpolation_ratios(samples: List[Sample], grid: Grid, q: float) -> _Ratios:
    """||f||_{q*} <= c_grad ||grad f||_q + c_l1 ||f||_1."""
    qs = _sobolev_conjugate(grid.n, q)
    zero = 0.0
    flat = [s for s in samples if not np.any(s.gradient)]
    for s in flat:
        l1 = _lp(grid, s.values, 1.0)
        if l1 > 0:
            zero = max(zero, _lp(grid, s.values, qs) / l1)
    residual = -np.inf
    for s in samples:
        g = _lp(grid, _grad_norm(s), q)
        if g > 0:
            gap = _lp(grid, s.values, qs) - zero * _lp(grid, s.values, 1.0)
            residual = max(residual, gap / g)
    return _Ratios(zero, residual)


def _trace_ratios(samples: List[Sample], grid: Grid) -> _Ratios:
    """int_G |f| <= c5 int_U |f| + c6 int_U |grad f|."""
    zero = 0.0
    for s in samples:
        if not np.any(s.gradient):
            vol = integrate_volume(grid, np.abs(s.values))
            if vol > 0:
                zero = max(zero, integrate_boundary(grid, np.abs(s.boundary)) / vol)
    residual = -np.inf
    for s in samples:
        g = integrate_volume(grid, _grad_norm(s))
        if g > 0:
            lhs = integrate_boundary(grid, np.abs(s.boundary))
            residual = max(
                residual, (lhs - zero * integrate_volume(grid, np.abs(s.values))) / g
            )
    return _Ratios(zero, residual)


def _standard_sobolev(samples: List[Sample], grid: Grid, q: float) -> float:
    """||f||_{q*} <= c7 (int |grad f|^q + int |f|^q)^{1/q}."""
    qs = _sobolev_conjugate(grid.n, q)
    best = 0.0
    for s in samples:
        denom = (
            integrate_volume(grid, _grad_norm(s) ** q)
            + integrate_volume(grid, np.abs(s.values) ** q)
        ) ** (1.0 / q)
        if denom > 0:
            best = max(best, _lp(grid, s.values, qs) / denom)
    return best


def calibrate_constants(
    grid: Grid,
    r1: float,
    p: float,
    family: TestFunctionFamily,
    safety_factor: Optional[float] = None,
) -> EmbeddingConstants:
    """Smallest family-consistent constants, each times the safety factor.

    The unit constant is always part of the calibration set, so the
    zero-gradient constants are pinned by it (c2, c4 >= |U|^{1/q*-1} and
    c5 >= |boundary|/|U|); the gradient constants are maxima of residual ratios.
    """
    bad = r1_violation(grid.n, p, r1)
    if bad:
        raise AdmissibilityError(f"cannot calibrate: {bad}", _HARNESS, bad)
    safety = get_settings().safety_factor if safety_factor is None else safety_factor
    if safety < 1:
        raise AdmissibilityError(
            f"safety factor must be >= 1, got {safety}", _HARNESS, "safety_factor >= 1"
        )

    members = family.members(grid.n)
    samples = [m.sample(grid) for m in members]
    if not any(np.any(s.values != 0) for s in samples):
        raise DegenerateFamilyError(
            f"family ({family.describe()}) has no nonzero member", _HARNESS
        )
    if not any(m.kind == "constant" for m in members):
        samples.insert(0, FamilyMember(-1, "constant").sample(grid))

    floor = float(np.finfo(float).tiny)
    sob = _interpolation_ratios(samples, grid, p)
    sob_r1 = _interpolation_ratios(samples, grid, r1 * p)
    trace = _trace_ratios(samples, grid)
    c7 = _standard_sobolev(samples, grid, r1 * p)

    consts = EmbeddingConstants(
        c1=safety * max(sob.residual, floor),
        c2=safety * sob.zero_grad,
        c3=safety * max(sob_r1.residual, floor),
        c4=safety * sob_r1.zero_grad,
        c5=safety * trace.zero_grad,
        c6=safety * max(trace.residual, floor),
        c7=safety * c7,
        safety_factor=safety,
        provenance="calibrated",
        seed=family.seed,
        family=family.describe(),
    )
    logger.info(
        "calibrated on %d functions at %s: c1=%.6g c2=%.6g c3=%.6g c4=%.6g "
        "c5=%.6g c6=%.6g c7=%.6g",
        len(samples),
        grid.describe(),
        consts.c1,
        consts.c2,
        consts.c3,
        consts.c4,
        consts.c5,
        consts.c6,
        consts.c7,
    )
    return consts
