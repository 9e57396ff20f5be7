"""The initial boundary value problem handed to the finite-volume solver."""

from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Tuple, Union

import numpy as np

from ..core.fields import resolve_boundary_field, resolve_field
from ..core.grid import BoundaryField, Grid, SpatialField
from ..core.log import get_logger
from ..models.base import Component, ConfigError
from ..models.forchheimer import ForchheimerLaw, lambda_from_gamma, preset_law
from ..types.common import FloatArray
from ..types.runconfig import RunConfig

logger = get_logger(__name__)

_SOLVER = Component.SOLVER.value

# s_mms(t) -> one value per cell, shape grid.shape
SourceTerm = Callable[[float], FloatArray]


@dataclass(frozen=True)
class Scenario:
    """phi (u^lam)_t = div X(x, grad u + Z(u)) with X.nu + psi u^lam = 0.

    Z(u) = -cz u^{2 lam} direction, so |Z(u)| = cz u^{2 lam} exactly.
    """

    grid: Grid
    law: ForchheimerLaw
    phi: SpatialField
    lam: float
    psi: BoundaryField
    u0: SpatialField
    t_final: float
    cz: float = 0.0
    direction: Tuple[float, ...] = ()
    source: Optional[SourceTerm] = None
    name: str = "scenario"

    def __post_init__(self) -> None:
        if not self.lam > 0:
            raise ConfigError(f"lambda must be positive, got {self.lam}", _SOLVER)
        if not self.t_final > 0:
            raise ConfigError(f"T_final must be positive, got {self.t_final}", _SOLVER)
        if self.cz < 0:
            raise ConfigError(f"C_Z must be nonnegative, got {self.cz}", _SOLVER)
        for name, f in (("phi", self.phi), ("u0", self.u0)):
            if f.grid != self.grid:
                raise ConfigError(f"{name} lives on a different grid", _SOLVER)
        if self.law.grid != self.grid or self.psi.grid != self.grid:
            raise ConfigError("law and psi must live on the scenario grid", _SOLVER)
        self.phi.require_positive(_SOLVER)
        if np.any(self.u0.values < 0):
            cell = tuple(int(i) for i in np.argwhere(self.u0.values < 0)[0])
            raise ConfigError(f"u0 must be nonnegative; cell {cell} is not", _SOLVER)

        direction = self.direction or tuple(
            1.0 if k == self.grid.n - 1 else 0.0 for k in range(self.grid.n)
        )
        vec = np.asarray(direction, dtype=float)
        norm = float(np.linalg.norm(vec))
        if vec.size != self.grid.n or norm == 0.0:
            raise ConfigError(
                f"direction needs {self.grid.n} components, not all zero", _SOLVER
            )
        object.__setattr__(self, "direction", tuple(float(v) for v in vec / norm))

    @property
    def n(self) -> int:
        return self.grid.n

    @property
    def degeneracy(self) -> float:
        return self.law.degeneracy

    def z_magnitude(self, u: FloatArray) -> FloatArray:
        return self.cz * np.asarray(u, dtype=float) ** (2.0 * self.lam)

    def with_horizon(self, t_final: float) -> "Scenario":
        return Scenario(
            self.grid,
            self.law,
            self.phi,
            self.lam,
            self.psi,
            self.u0,
            t_final,
            self.cz,
            self.direction,
            self.source,
            self.name,
        )

    def describe(self) -> str:
        return (
            f"{self.name}: {self.grid.describe()}, {self.law.describe()}, "
            f"lambda={self.lam:g}, C_Z={self.cz:g}, T={self.t_final:g}"
        )


def build_grid(cfg: RunConfig) -> Grid:
    d = cfg.domain
    return Grid(d.n, tuple(d.cells), tuple((lo, hi) for lo, hi in d.extents))


def scenario_lambda(cfg: RunConfig) -> float:
    sc = cfg.scenario
    if sc.gamma is not None:
        return lambda_from_gamma(sc.gamma)
    return float(sc.lam)


def build_scenario(
    cfg: RunConfig, base_dir: Optional[Union[str, Path]] = None
) -> Scenario:
    """Materialize grid, law, fields and boundary data from a run config."""
    grid = build_grid(cfg)
    base = None if base_dir is None else str(base_dir)
    law = preset_law(cfg.law.preset, cfg.law.to_params(), grid, base)
    sc = cfg.scenario
    phi = resolve_field(sc.phi, grid, "phi", base)
    u0 = resolve_field(sc.u0, grid, "u0", base)
    psi = resolve_boundary_field(
        sc.psi, grid, "psi", base, times=sc.psi_times, scales=sc.psi_scales
    )
    scenario = Scenario(
        grid,
        law,
        phi,
        scenario_lambda(cfg),
        psi,
        u0,
        sc.t_final,
        sc.cz,
        tuple(sc.direction or ()),
        None,
        sc.name,
    )
    logger.info("scenario %s", scenario.describe())
    return scenario
