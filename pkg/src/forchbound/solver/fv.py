"""Backward-Euler finite volumes for phi (u^lam)_t = div X(x, grad u + Z(u)).

The unknown is w = u^lam, so the time derivative is linear in it. Each step
runs a frozen-coefficient Picard iteration

    w^{k+1} = w_old + dt / phi * (div_h F(w^k) + s_mms(t + dt)),

where F holds the normal component of X on every face. Interior faces take
X at face sites built from averaged coefficients; boundary faces carry the
Robin flux psi(t + dt) w_b, with w_b the value of the adjacent cell.
Because every face flux enters its two cells with opposite signs, the
discrete mass identity holds for each iterate, converged or not.
"""

from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..core.grid import Grid, SpatialField, TimeSeries
from ..core.log import get_logger
from ..core.quadrature import (
    cells_to_faces,
    discrete_divergence,
    discrete_gradient,
    integrate_boundary,
    integrate_volume,
)
from ..models.base import Component, ConvergenceError, SolverError
from ..types.common import FloatArray
from ..types.runconfig import SolverConfig
from .scenario import Scenario

logger = get_logger(__name__)

_SOLVER = Component.SOLVER.value

DT_GROWTH = 1.2
EASY_STEPS_BEFORE_GROWTH = 3


def boundary_state(grid: Grid, w: FloatArray) -> FloatArray:
    """w of the adjacent cell on every boundary face, in boundary order."""
    return grid.boundary_trace(np.asarray(w, dtype=float))


def u_of_w(w: FloatArray, lam: float) -> FloatArray:
    return np.maximum(w, 0.0) ** (1.0 / lam)


@dataclass(frozen=True)
class FaceFluxes:
    """Normal fluxes on every face plus the boundary state they were built from."""

    normal: Tuple[FloatArray, ...]
    w_boundary: FloatArray
    psi: FloatArray


def face_fluxes(scenario: Scenario, w: FloatArray, t: float) -> FaceFluxes:
    """Normal component of X(x, grad u + Z(u)) on every face at state w.

    Boundary faces carry F = psi w_b on the low side and -psi w_b on the high
    side, i.e. outward flux -psi w_b.
    """
    grid = scenario.grid
    w = np.asarray(w, dtype=float).reshape(grid.shape)
    u = u_of_w(w, scenario.lam)
    gradient = discrete_gradient(grid, u)
    psi = np.asarray(scenario.psi.at(t), dtype=float)
    w_b = boundary_state(grid, w)
    normals: List[FloatArray] = []
    for k in range(grid.n):
        g = np.array(gradient.components[k], copy=True)
        if scenario.cz > 0:
            # |Z| = cz u^{2 lam} = cz w^2, with w averaged onto the face
            zmag = scenario.cz * cells_to_faces(w, k) ** 2
            for j, e_j in enumerate(scenario.direction):
                if e_j:
                    g[j] = g[j] - zmag * e_j
        f = np.zeros(grid.face_shape(k))
        inner: List[object] = [slice(None)] * grid.n
        inner[k] = slice(1, -1)
        interior = tuple(inner)
        mask = np.zeros(grid.face_shape(k), dtype=bool)
        mask[interior] = True
        sites = scenario.law.face_sites(k).subset(mask.ravel())
        x = sites.x_values(g[(slice(None),) + interior].reshape(grid.n, -1))
        f[interior] = x[k].reshape(f[interior].shape)
        for side in (0, 1):
            flux = psi * w_b
            block = grid.boundary_block(flux, k, side)
            idx: List[object] = [slice(None)] * grid.n
            idx[k] = 0 if side == 0 else -1
            f[tuple(idx)] = block if side == 0 else -block
        normals.append(f)
    return FaceFluxes(tuple(normals), w_b, psi)


@dataclass(frozen=True)
class StepRecord:
    t: float  # time at the end of the step
    dt: float
    picard_iterations: int
    halvings: int
    outflow: float  # int_G psi w_b over the fluxes actually used
    source: float  # int_U s_mms(t)
    clamped_cells: int
    clamped_mass: float  # int_U phi (added mass) from clamping


@dataclass(frozen=True)
class StepResult:
    w: FloatArray
    record: StepRecord
    converged: bool


def _source_values(scenario: Scenario, t: float) -> Optional[FloatArray]:
    if scenario.source is None:
        return None
    return np.broadcast_to(
        np.asarray(scenario.source(t), dtype=float), scenario.grid.shape
    )


def _picard(
    scenario: Scenario,
    w_old: FloatArray,
    t_new: float,
    dt: float,
    config: SolverConfig,
) -> Tuple[Optional[FloatArray], Optional[FaceFluxes], int]:
    """(w, fluxes used for it, iterations); w is None when the iteration failed."""
    grid = scenario.grid
    phi = scenario.phi.values
    src = _source_values(scenario, t_new)
    current = w_old
    for it in range(1, config.picard_max + 1):
        try:
            with np.errstate(all="ignore"):
                fluxes = face_fluxes(scenario, current, t_new)
                rhs = discrete_divergence(grid, fluxes.normal)
                if src is not None:
                    rhs = rhs + src
                new = w_old + dt / phi * rhs
        except ConvergenceError as e:
            logger.debug("flux root solve failed at iteration %d: %s", it, e)
            return None, None, it
        if not np.all(np.isfinite(new)):
            return None, None, it
        delta = float(np.max(np.abs(new - current)))
        scale = float(np.max(np.abs(new)))
        if delta == 0.0 or delta <= config.picard_tol * scale:
            return new, fluxes, it
        # keep iterates admissible for the fractional powers
        current = np.maximum(new, 0.0)
    return None, None, config.picard_max


def step(
    state: SpatialField,
    t: float,
    dt: float,
    scenario: Scenario,
    config: SolverConfig,
    halvings: int = 0,
) -> StepResult:
    """One backward-Euler step of w = u^lam from t to t + dt.

    dt must lie in (0, dt_max]. It is not held to dt_min: ``solve`` refuses to
    halve below dt_min, but its final step may be shorter so as to land on
    T_final exactly.

    ``converged`` is False when Picard diverged or ran out of iterations;
    the returned state is then the unchanged input.
    """
    w_old = np.asarray(state.values, dtype=float)
    if np.any(w_old < 0):
        raise SolverError("step needs a nonnegative state", _SOLVER)
    if not 0 < dt <= config.dt_max:
        raise SolverError(
            f"time step {dt} outside (0, dt_max={config.dt_max:g}]", _SOLVER
        )
    grid = scenario.grid
    t_new = t + dt
    w_new, fluxes, iterations = _picard(scenario, w_old, t_new, dt, config)
    if w_new is None or fluxes is None:
        record = StepRecord(t_new, dt, iterations, halvings, 0.0, 0.0, 0, 0.0)
        return StepResult(w_old, record, False)

    negative = w_new < 0
    clamped_cells = int(np.count_nonzero(negative))
    clamped_mass = 0.0
    if clamped_cells:
        clamped_mass = integrate_volume(
            grid, np.where(negative, -w_new, 0.0) * scenario.phi.values
        )
        logger.warning(
            "t=%.6g: clamped %d negative cells (added mass %.3e)",
            t_new,
            clamped_cells,
            clamped_mass,
        )
        w_new = np.maximum(w_new, 0.0)

    outflow = integrate_boundary(grid, fluxes.psi * fluxes.w_boundary)
    src = _source_values(scenario, t_new)
    source = 0.0 if src is None else integrate_volume(grid, src)
    logger.debug("t=%.6g dt=%.3e: %d Picard iterations", t_new, dt, iterations)
    record = StepRecord(
        t_new, dt, iterations, halvings, outflow, source, clamped_cells, clamped_mass
    )
    return StepResult(w_new, record, True)


@dataclass(frozen=True)
class SolutionTrace:
    """Snapshots of u, per-step integrals and step diagnostics of one run."""

    scenario: Scenario
    snapshot_times: Tuple[float, ...]
    snapshots: Tuple[SpatialField, ...]
    mass: TimeSeries  # int phi u^lam, every step, t = 0 included
    energies: Dict[float, TimeSeries]  # alpha -> int phi u^alpha
    outflow: TimeSeries  # int_G psi u^lam per step, at step end times
    steps: Tuple[StepRecord, ...]
    meta: Dict[str, object] = field(default_factory=dict)

    @property
    def final(self) -> SpatialField:
        return self.snapshots[-1]

    @property
    def clamp_events(self) -> List[StepRecord]:
        return [s for s in self.steps if s.clamped_cells]

    def max_clamped_fraction(self) -> float:
        ncells = self.scenario.grid.ncells
        return max((s.clamped_cells / ncells for s in self.steps), default=0.0)

    def summary(self) -> Dict[str, object]:
        dts = [s.dt for s in self.steps]
        return {
            "steps": len(self.steps),
            "snapshots": len(self.snapshots),
            "t_final": self.snapshot_times[-1],
            "dt_min_used": min(dts, default=0.0),
            "dt_max_used": max(dts, default=0.0),
            "picard_total": sum(s.picard_iterations for s in self.steps),
            "halvings": sum(s.halvings for s in self.steps),
            "clamp_events": len(self.clamp_events),
            "max_clamped_fraction": self.max_clamped_fraction(),
            **self.meta,
        }


def weighted_power(scenario: Scenario, u: FloatArray, alpha: float) -> float:
    return integrate_volume(scenario.grid, scenario.phi.values * u**alpha)


def solve(
    scenario: Scenario,
    config: SolverConfig,
    alpha_list: Optional[Sequence[float]] = None,
) -> SolutionTrace:
    """Integrate to T_final with adaptive dt.

    dt halves on Picard failure and grows by 1.2 (up to dt_max) after three
    consecutive easy steps; the last step is shortened to land on T_final.
    """
    alphas = tuple(config.alpha_list if alpha_list is None else alpha_list)
    lam = scenario.lam
    grid = scenario.grid
    w = SpatialField(grid, scenario.u0.values**lam, "w")
    t = 0.0
    dt = config.dt_initial
    easy = 0

    def record_u(u: FloatArray) -> None:
        mass_values.append(weighted_power(scenario, u, lam))
        for a in alphas:
            energy_values[a].append(weighted_power(scenario, u, a))

    u = scenario.u0.values
    times = [0.0]
    mass_values: List[float] = []
    energy_values: Dict[float, List[float]] = {a: [] for a in alphas}
    record_u(u)
    snap_times = [0.0]
    snaps = [SpatialField(grid, u, "u")]
    steps: List[StepRecord] = []

    logger.info("solving %s", scenario.describe())
    while t < scenario.t_final:
        remaining = scenario.t_final - t
        last = dt >= remaining
        trial = remaining if last else dt
        halvings = 0
        while True:
            result = step(w, t, trial, scenario, config, halvings)
            if result.converged:
                break
            halvings += 1
            trial *= 0.5
            last = False
            if trial < config.dt_min:
                raise ConvergenceError(
                    f"Picard failed at t={t:.6g}: dt halved {halvings} times "
                    f"below dt_min={config.dt_min:g} "
                    f"({result.record.picard_iterations} iterations at the "
                    "last attempt)",
                    _SOLVER,
                )
            logger.info("t=%.6g: Picard failed, halving dt to %.3e", t, trial)

        rec = result.record
        steps.append(rec)
        t = scenario.t_final if last else rec.t
        if last:
            rec = replace(rec, t=t)
            steps[-1] = rec
        w = SpatialField(grid, result.w, "w")
        u = u_of_w(result.w, lam)
        times.append(t)
        record_u(u)
        if len(steps) % config.output_every == 0 or t >= scenario.t_final:
            snap_times.append(t)
            snaps.append(SpatialField(grid, u, "u"))

        if halvings == 0 and rec.picard_iterations <= config.picard_max // 2:
            easy += 1
        else:
            easy = 0
        if halvings:
            dt = trial
        if easy >= EASY_STEPS_BEFORE_GROWTH:
            dt = min(dt * DT_GROWTH, config.dt_max)
            easy = 0

    trace = SolutionTrace(
        scenario=scenario,
        snapshot_times=tuple(snap_times),
        snapshots=tuple(snaps),
        mass=TimeSeries.from_lists(times, mass_values, "mass"),
        energies={
            a: TimeSeries.from_lists(times, v, f"energy_{a:g}")
            for a, v in energy_values.items()
        },
        outflow=TimeSeries.from_lists(times[1:], [s.outflow for s in steps], "outflow"),
        steps=tuple(steps),
    )
    logger.info(
        "solved to t=%.6g in %d steps (%d halvings, %d clamp events)",
        t,
        len(steps),
        sum(s.halvings for s in steps),
        len(trace.clamp_events),
    )
    return trace
