"""Generalized Forchheimer laws: g, the inverse profile s, the kernel K and the flux X.

All quantities are nondimensional. Coefficients live on cells; the solver
builds face "sites" from arithmetic averages of the two adjacent cells.
"""

from dataclasses import dataclass
from typing import Any, Dict, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..config import get_settings
from ..core.fields import resolve_field
from ..core.grid import Grid, SpatialField
from ..core.log import get_logger
from ..core.presets import PresetRegistry
from ..core.quadrature import cells_to_faces
from ..core.rootfind import safeguarded_newton
from ..types.common import CellIndex, FloatArray
from .base import Component, ConfigError, ConstitutiveError

logger = get_logger(__name__)


@dataclass(frozen=True)
class LawSites:
    """Coefficient columns of a law at a set of sites (cells or faces).

    ``coefficients`` has shape (N+1, m); every kernel is vectorized over the
    trailing site axis.
    """

    exponents: Tuple[float, ...]
    coefficients: FloatArray

    @property
    def degeneracy(self) -> float:
        top = self.exponents[-1]
        return top / (top + 1.0)

    @property
    def size(self) -> int:
        return int(self.coefficients.shape[1])

    def subset(self, columns: FloatArray) -> "LawSites":
        """The sites selected by a boolean mask or index array."""
        return LawSites(self.exponents, self.coefficients[:, columns])

    def g_values(self, s: FloatArray) -> FloatArray:
        s = np.asarray(s, dtype=np.float64)
        total = np.zeros(np.broadcast(s, self.coefficients[0]).shape)
        for a_i, e_i in zip(self.coefficients, self.exponents):
            total = total + a_i * (s**e_i if e_i else 1.0)
        return total

    def _sg_and_slope(self, s: FloatArray) -> Tuple[FloatArray, FloatArray]:
        value = np.zeros_like(s)
        slope = np.zeros_like(s)
        for a_i, e_i in zip(self.coefficients, self.exponents):
            power = s**e_i if e_i else 1.0
            value = value + a_i * power * s
            slope = slope + a_i * (e_i + 1.0) * power
        return value, slope

    def s_values(self, xi: FloatArray, tol: Optional[float] = None) -> FloatArray:
        xi = np.atleast_1d(np.asarray(xi, dtype=np.float64))
        if np.any(xi < 0):
            raise ConstitutiveError(
                "s(x, xi) needs xi >= 0", Component.CONSTITUTIVE.value
            )
        shape = np.broadcast_shapes(xi.shape, (self.size,))
        xi = np.broadcast_to(xi, shape)
        coef = np.broadcast_to(self.coefficients, (len(self.exponents),) + shape)
        tol = get_settings().root_tol if tol is None else tol
        a0 = coef[0]
        aN = coef[-1]

        if len(self.exponents) == 2 and self.exponents[1] == 1.0:
            # a0 s + a1 s^2 = xi, in the cancellation-free form
            return 2.0 * xi / (a0 + np.sqrt(a0 * a0 + 4.0 * aN * xi))

        out = np.zeros(shape)
        live = xi > 0
        if not np.any(live):
            return out
        x = xi[live]
        sites = LawSites(self.exponents, coef[:, live])
        hi = np.minimum(
            x / a0[live], (x / aN[live]) ** (1.0 / (self.exponents[-1] + 1.0))
        )

        def residual(s: FloatArray) -> Tuple[FloatArray, FloatArray]:
            value, slope = sites._sg_and_slope(s)
            return value - x, slope

        out[live] = safeguarded_newton(
            residual, np.zeros_like(x), hi, atol=tol * (1.0 + x)
        )
        return out

    def k_values(self, xi: FloatArray, tol: Optional[float] = None) -> FloatArray:
        return 1.0 / self.g_values(self.s_values(xi, tol))

    def x_values(self, y: FloatArray, tol: Optional[float] = None) -> FloatArray:
        """X(x, y) = K(x, |y|) y for y of shape (n, m)."""
        y = np.asarray(y, dtype=np.float64)
        k = self.k_values(np.sqrt(np.sum(y * y, axis=0)), tol)
        return k * y


@dataclass(frozen=True)
class ForchheimerLaw:
    """g(x, s) = sum_i a_i(x) s^{alpha_i} with 0 = alpha_0 < ... < alpha_N."""

    exponents: Tuple[float, ...]
    coefficients: Tuple[SpatialField, ...]
    name: str = "custom"

    def __post_init__(self) -> None:
        exps = tuple(float(e) for e in self.exponents)
        object.__setattr__(self, "exponents", exps)
        if len(exps) < 2:
            raise ConstitutiveError(
                "a Forchheimer law needs N >= 1", Component.CONSTITUTIVE.value
            )
        if exps[0] != 0.0:
            raise ConstitutiveError(
                f"the first exponent must be 0, got {exps[0]}",
                Component.CONSTITUTIVE.value,
            )
        if any(b <= a for a, b in zip(exps, exps[1:])):
            raise ConstitutiveError(
                f"exponents must be strictly increasing: {exps}",
                Component.CONSTITUTIVE.value,
            )
        if len(self.coefficients) != len(exps):
            raise ConstitutiveError(
                f"{len(exps)} exponents need {len(exps)} coefficient fields, "
                f"got {len(self.coefficients)}",
                Component.CONSTITUTIVE.value,
            )
        grid = self.coefficients[0].grid
        if any(c.grid != grid for c in self.coefficients):
            raise ConstitutiveError(
                "coefficient fields live on different grids",
                Component.CONSTITUTIVE.value,
            )
        for i in (0, len(exps) - 1):
            field = self.coefficients[i]
            if np.any(field.values <= 0):
                cell = tuple(int(j) for j in np.argwhere(field.values <= 0)[0])
                raise ConstitutiveError(
                    f"a_{i} must be positive; cell {cell} holds "
                    f"{field.values[cell]!r}",
                    Component.CONSTITUTIVE.value,
                )
        for i, field in enumerate(self.coefficients[1:-1], start=1):
            if np.any(field.values < 0):
                raise ConstitutiveError(
                    f"a_{i} must be nonnegative", Component.CONSTITUTIVE.value
                )

    @property
    def grid(self) -> Grid:
        return self.coefficients[0].grid

    @property
    def order(self) -> int:
        """N, the index of the top exponent."""
        return len(self.exponents) - 1

    @property
    def degeneracy(self) -> float:
        """a = alpha_N / (alpha_N + 1), in (0, 1)."""
        top = self.exponents[-1]
        return top / (top + 1.0)

    def coefficient_matrix(self) -> FloatArray:
        return np.stack([c.flat for c in self.coefficients])

    def sites(self) -> LawSites:
        return LawSites(self.exponents, self.coefficient_matrix())

    def cell_site(self, cell: CellIndex) -> LawSites:
        flat = _flat_index(self.grid, cell)
        return LawSites(self.exponents, self.coefficient_matrix()[:, [flat]])

    def face_sites(self, axis: int) -> LawSites:
        """Sites on every face normal to ``axis``, boundary faces included."""
        columns = [
            cells_to_faces(c.values, axis).ravel() for c in self.coefficients
        ]
        return LawSites(self.exponents, np.stack(columns))

    def describe(self) -> str:
        return f"{self.name} law, exponents {list(self.exponents)}"


def _flat_index(grid: Grid, cell: CellIndex) -> int:
    if isinstance(cell, (int, np.integer)):
        if not 0 <= int(cell) < grid.ncells:
            raise IndexError(f"cell {cell} outside a grid of {grid.ncells} cells")
        return int(cell)
    return int(np.ravel_multi_index(tuple(cell), grid.shape))


def eval_g(law: ForchheimerLaw, cell: CellIndex, s: float) -> float:
    if s < 0:
        raise ConstitutiveError("g(x, s) needs s >= 0", Component.CONSTITUTIVE.value)
    return float(law.cell_site(cell).g_values(np.array([s]))[0])


def solve_s(
    law: ForchheimerLaw, cell: CellIndex, xi: float, tol: Optional[float] = None
) -> float:
    return float(law.cell_site(cell).s_values(np.array([xi]), tol)[0])


def eval_K(
    law: ForchheimerLaw, cell: CellIndex, xi: float, tol: Optional[float] = None
) -> float:
    return float(law.cell_site(cell).k_values(np.array([xi]), tol)[0])


def eval_X(
    law: ForchheimerLaw,
    cell: CellIndex,
    y: Sequence[float],
    tol: Optional[float] = None,
) -> FloatArray:
    vec = np.asarray(y, dtype=np.float64).reshape(-1, 1)
    return law.cell_site(cell).x_values(vec, tol)[:, 0]


def lambda_from_gamma(gamma: float) -> float:
    """lambda = 1/(gamma + 1) for a specific heat ratio gamma >= 1."""
    if gamma < 1:
        raise ConfigError(
            f"specific heat ratio must be >= 1, got {gamma}",
            Component.CONSTITUTIVE.value,
        )
    return 1.0 / (gamma + 1.0)


def preset_law(
    name: str, params: Mapping[str, Any], grid: Grid, base_dir: Optional[str] = None
) -> ForchheimerLaw:
    """Build a law from a registered preset.

    ``params`` carries either a ``coefficients`` list or the preset's named
    coefficients (a, b, c); every entry is a number or a field spec.
    ``power_law`` also needs ``m`` in (1, 2); ``custom`` needs ``exponents``.
    """
    canonical = PresetRegistry.resolve_law_alias(name)
    if not PresetRegistry.is_valid_law(canonical):
        raise ConfigError(
            f"unknown law preset '{name}'; choose from "
            f"{PresetRegistry.get_all_law_names()}",
            Component.CONSTITUTIVE.value,
        )
    config = PresetRegistry.get_law_config(canonical)

    if canonical == "power_law":
        m = params.get("m")
        if m is None or not 1.0 < float(m) < 2.0:
            raise ConfigError(
                f"power_law needs m in (1, 2), got {m}", Component.CONSTITUTIVE.value
            )
        exponents: Tuple[float, ...] = (0.0, float(m) - 1.0)
    elif canonical == "custom":
        if "exponents" not in params:
            raise ConfigError(
                "custom law needs an exponents list", Component.CONSTITUTIVE.value
            )
        exponents = tuple(float(e) for e in params["exponents"])
    else:
        exponents = tuple(config["exponents"])

    raw = params.get("coefficients")
    if raw is None:
        names = config["coefficient_names"]
        missing = [k for k in names if k not in params]
        if missing:
            raise ConfigError(
                f"{canonical} law is missing coefficients {missing}",
                Component.CONSTITUTIVE.value,
            )
        raw = [params[k] for k in names]
    if len(raw) != len(exponents):
        raise ConfigError(
            f"{canonical} law needs {len(exponents)} coefficients, got {len(raw)}",
            Component.CONSTITUTIVE.value,
        )

    fields = tuple(
        resolve_field(_as_spec(v), grid, f"a_{i}", base_dir) for i, v in enumerate(raw)
    )
    law = ForchheimerLaw(exponents, fields, canonical)
    logger.debug("built %s (a = %.6g)", law.describe(), law.degeneracy)
    return law


def _as_spec(value: Any) -> str:
    if isinstance(value, str):
        return value
    return f"constant:{float(value)!r}"


def law_summary(law: ForchheimerLaw) -> Dict[str, Any]:
    return {
        "name": law.name,
        "exponents": list(law.exponents),
        "degeneracy": law.degeneracy,
        "coefficient_ranges": [[c.min(), c.max()] for c in law.coefficients],
    }
