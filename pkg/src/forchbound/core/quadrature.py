"""Midpoint quadrature, face gradients and divergences on a structured grid.

Sums go through numpy's pairwise reduction on contiguous arrays, so every
integral is bit-reproducible for a given grid.
"""

from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import logsumexp

from ..config import get_settings
from ..models.base import Component, ConfigError, QuadratureError
from ..types.common import FloatArray
from .grid import BoundaryField, Grid, SpatialField
from .log import get_logger
from .lognum import LogNumber

logger = get_logger(__name__)

CellIntegrand = Union[SpatialField, FloatArray, float, Callable[..., FloatArray]]
FaceIntegrand = Union[BoundaryField, FloatArray, float, Callable[..., FloatArray]]


def _cell_values(grid: Grid, integrand: CellIntegrand) -> FloatArray:
    if isinstance(integrand, SpatialField):
        return integrand.values
    if callable(integrand):
        integrand = integrand(*grid.centers())
    return np.broadcast_to(np.asarray(integrand, dtype=np.float64), grid.shape)


def _require_finite(values: FloatArray, what: str) -> None:
    bad = ~np.isfinite(values)
    if np.any(bad):
        cell = tuple(int(i) for i in np.argwhere(bad)[0])
        raise QuadratureError(
            f"{what} integrand is not finite at index {cell}",
            Component.GRID.value,
            cell=cell,
        )


def integrate_volume(grid: Grid, integrand: CellIntegrand) -> float:
    """Midpoint rule: sum of integrand(cell) times the cell volume."""
    values = _cell_values(grid, integrand)
    _require_finite(values, "volume")
    return float(np.sum(np.ascontiguousarray(values).ravel()) * grid.cell_volume)


def integrate_boundary(
    grid: Grid, integrand: FaceIntegrand, t: Optional[float] = None
) -> float:
    """Face-center rule over the boundary faces, weighted by face areas."""
    if isinstance(integrand, BoundaryField):
        values = integrand.at(0.0 if t is None else t)
    elif callable(integrand):
        values = np.asarray(integrand(*grid.boundary_face_centers()), dtype=np.float64)
    else:
        values = np.asarray(integrand, dtype=np.float64)
    values = np.broadcast_to(values, (grid.boundary_face_count,))
    _require_finite(values, "boundary")
    return float(np.sum(values * grid.boundary_face_areas()))


def weighted_lp_norm(u: SpatialField, phi: SpatialField, p: float) -> float:
    """(integral of |u|^p phi)^(1/p)."""
    if p < 1:
        raise ConfigError(f"Lp norm needs p >= 1, got {p}", Component.GRID.value)
    phi.require_positive(Component.GRID.value)
    return integrate_volume(u.grid, np.abs(u.values) ** p * phi.values) ** (1.0 / p)


@dataclass(frozen=True)
class PowerIntegral:
    """Integral of a product of powers, kept in log space."""

    value: LogNumber
    possibly_divergent: bool = False

    def to_dict(self) -> dict:
        return {**self.value.to_dict(), "possibly_divergent": self.possibly_divergent}


def power_integral(
    grid: Grid,
    factors: Sequence[Tuple[FloatArray, float]],
    label: str = "",
    domain: str = "volume",
) -> PowerIntegral:
    """Integral of prod_i f_i^{e_i} over cells (or boundary faces).

    Bases must be nonnegative. A base below the divergence floor under a
    negative exponent is floored and the result flagged as possibly divergent.
    """
    floor = get_settings().divergence_floor
    if domain == "volume":
        size, log_measure = grid.ncells, np.log(grid.cell_volume)
    else:
        size = grid.boundary_face_count
        log_measure = np.log(grid.boundary_face_areas())
    log_integrand = np.zeros(size)
    divergent = False
    for base, exponent in factors:
        b = np.asarray(base, dtype=np.float64).ravel()
        if b.size == 1:
            b = np.full(size, b[0])
        if b.size != size:
            raise QuadratureError(
                f"{label}: factor has {b.size} values for {size} sites",
                Component.GRID.value,
            )
        if exponent == 0:
            continue
        if np.any(b < 0) or not np.all(np.isfinite(b)):
            bad = int(np.argmax((b < 0) | ~np.isfinite(b)))
            raise QuadratureError(
                f"{label}: base must be finite and nonnegative (site {bad} "
                f"holds {b[bad]!r})",
                Component.GRID.value,
                cell=(bad,),
            )
        if exponent < 0 and np.any(b < floor):
            divergent = True
            b = np.maximum(b, floor)
        with np.errstate(divide="ignore"):
            log_integrand = log_integrand + exponent * np.log(b)
    if divergent:
        logger.warning("%s may diverge: a weight falls below %.0e", label, floor)
    terms = log_integrand + log_measure
    if np.all(terms == -np.inf):
        return PowerIntegral(LogNumber(-np.inf), divergent)
    return PowerIntegral(LogNumber(float(logsumexp(terms))), divergent)


def cells_to_faces(values: FloatArray, axis: int) -> FloatArray:
    """Average adjacent cells onto faces normal to ``axis``.

    Boundary faces copy the adjacent cell.
    """
    v = np.asarray(values, dtype=np.float64)
    lo = np.take(v, [0], axis=axis)
    hi = np.take(v, [-1], axis=axis)
    n = v.shape[axis]
    inner = 0.5 * (
        np.take(v, range(0, n - 1), axis=axis) + np.take(v, range(1, n), axis=axis)
    )
    return np.concatenate([lo, inner, hi], axis=axis)


@dataclass(frozen=True)
class FaceGradient:
    """Full gradient vectors on the faces normal to each axis.

    ``components[k]`` has shape (n,) + grid.face_shape(k).
    """

    grid: Grid
    components: Tuple[FloatArray, ...]

    def normal(self, axis: int) -> FloatArray:
        return self.components[axis][axis]

    def magnitude(self, axis: int) -> FloatArray:
        return np.sqrt(np.sum(self.components[axis] ** 2, axis=0))


def discrete_gradient(
    grid: Grid, values: Union[SpatialField, FloatArray]
) -> FaceGradient:
    """Gradient on every face: two-point normal difference, averaged tangentials.

    Tangential derivatives are cell-wise (central inside, one-sided at the
    edges) and averaged onto the face, i.e. the mean of the four nearest
    parallel differences. Boundary faces reuse the nearest interior values.
    """
    u = values.values if isinstance(values, SpatialField) else np.asarray(values)
    u = np.asarray(u, dtype=np.float64).reshape(grid.shape)
    if any(c < 2 for c in grid.cells):
        raise ConfigError(
            "discrete gradients need at least 2 cells per axis", Component.GRID.value
        )
    h = grid.h
    cell_slopes = (
        [np.gradient(u, h[j], axis=j) for j in range(grid.n)] if grid.n > 1 else []
    )
    components: List[FloatArray] = []
    for k in range(grid.n):
        diff = np.diff(u, axis=k) / h[k]
        normal = np.concatenate(
            [np.take(diff, [0], axis=k), diff, np.take(diff, [-1], axis=k)], axis=k
        )
        vec = np.zeros((grid.n,) + grid.face_shape(k))
        vec[k] = normal
        for j in range(grid.n):
            if j != k:
                vec[j] = cells_to_faces(cell_slopes[j], k)
        components.append(vec)
    return FaceGradient(grid, tuple(components))


def face_weights(grid: Grid, axis: int) -> FloatArray:
    """Quadrature weights of the faces normal to ``axis`` (sum = |U|)."""
    w1 = np.full(grid.cells[axis] + 1, grid.cell_volume)
    w1[0] = w1[-1] = 0.5 * grid.cell_volume
    shape = [1] * grid.n
    shape[axis] = grid.cells[axis] + 1
    return np.broadcast_to(w1.reshape(shape), grid.face_shape(axis))


def grad_energy(
    u: Union[SpatialField, FloatArray],
    W: Union[SpatialField, FloatArray, float],
    alpha: float,
    s: float,
    p: float,
    grid: Optional[Grid] = None,
) -> float:
    """Face quadrature of |u|^{alpha-s} |grad u|^p W, averaged over face directions.

    |u| and W on a face are the means of the adjacent cells.
    """
    if grid is None:
        if not isinstance(u, SpatialField):
            raise ConfigError(
                "grad_energy needs a grid for raw arrays", Component.GRID.value
            )
        grid = u.grid
    signed = np.asarray(
        u.values if isinstance(u, SpatialField) else u, dtype=np.float64
    ).reshape(grid.shape)
    uv = np.abs(signed)
    wv = np.broadcast_to(
        np.asarray(W.values if isinstance(W, SpatialField) else W, dtype=np.float64),
        grid.shape,
    )
    if np.any(wv <= 0):
        raise ConfigError("grad_energy weight must be positive", Component.GRID.value)
    gradient = discrete_gradient(grid, signed)
    e = alpha - s
    total = 0.0
    warned = False
    for k in range(grid.n):
        g = gradient.magnitude(k)
        uf = cells_to_faces(uv, k)
        if e < 0 and np.any((uf == 0) & (g > 0)):
            if not warned:
                logger.warning(
                    "degenerate grad-energy integrand: |u| = 0 on a face with "
                    "negative power %.6g; flooring at %.0e",
                    e,
                    get_settings().divergence_floor,
                )
                warned = True
            uf = np.maximum(uf, get_settings().divergence_floor)
        with np.errstate(divide="ignore", invalid="ignore"):
            integrand = np.where(g > 0, uf**e * g**p, 0.0) * cells_to_faces(wv, k)
        _require_finite(integrand, "grad-energy")
        total += float(np.sum(integrand * face_weights(grid, k)))
    return total / grid.n


def cell_grad_energy(
    grid: Grid,
    u: FloatArray,
    grad: FloatArray,
    W: Union[FloatArray, float],
    alpha: float,
    s: float,
    p: float,
) -> float:
    """Midpoint version of grad_energy for a gradient sampled at cell centers.

    ``grad`` has shape (n,) + grid.shape.
    """
    uv = np.abs(np.asarray(u, dtype=np.float64)).reshape(grid.shape)
    g = np.sqrt(np.sum(np.asarray(grad, dtype=np.float64) ** 2, axis=0))
    e = alpha - s
    if e < 0 and np.any((uv == 0) & (g > 0)):
        logger.warning("degenerate grad-energy integrand; flooring |u|")
        uv = np.maximum(uv, get_settings().divergence_floor)
    with np.errstate(divide="ignore", invalid="ignore"):
        integrand = np.where(g > 0, uv**e * g**p, 0.0) * W
    return integrate_volume(grid, integrand)


def boundary_normal_flux(grid: Grid, normal_fluxes: Sequence[FloatArray]) -> FloatArray:
    """Outward flux F.nu on every boundary face, in boundary order."""
    out = []
    for k, side in grid.boundary_sides():
        f = np.take(normal_fluxes[k], 0 if side == 0 else -1, axis=k)
        out.append((-f if side == 0 else f).ravel())
    return np.concatenate(out)


def discrete_divergence(grid: Grid, normal_fluxes: Sequence[FloatArray]) -> FloatArray:
    """Cell divergence from face-normal fluxes (face arrays of grid.face_shape(k))."""
    div = np.zeros(grid.shape)
    for k in range(grid.n):
        div = div + np.diff(normal_fluxes[k], axis=k) / grid.h[k]
    return div
