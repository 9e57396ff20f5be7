"""Structured box grids and the immutable fields that live on them."""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..config import get_settings
from ..models.base import Component, ConfigError
from ..types.common import Extent, FloatArray, PointwiseMap


@dataclass(frozen=True)
class Grid:
    """Uniform cell-centered grid on the box prod_k [lo_k, hi_k]."""

    n: int
    cells: Tuple[int, ...]
    extents: Tuple[Extent, ...]

    def __post_init__(self) -> None:
        if self.n not in (1, 2, 3):
            raise ConfigError(
                f"spatial dimension must be 1, 2 or 3, got {self.n}",
                Component.GRID.value,
            )
        if len(self.cells) != self.n or len(self.extents) != self.n:
            raise ConfigError(
                f"cells and extents need {self.n} entries each",
                Component.GRID.value,
            )
        if any(c < 1 for c in self.cells):
            raise ConfigError(
                f"cell counts must be positive: {self.cells}", Component.GRID.value
            )
        if any(hi <= lo for lo, hi in self.extents):
            raise ConfigError(
                f"extents must satisfy lo < hi: {self.extents}", Component.GRID.value
            )
        budget = get_settings().max_cells
        if self.ncells > budget:
            raise ConfigError(
                f"grid has {self.ncells} cells, budget is {budget}",
                Component.GRID.value,
            )

    @classmethod
    def unit(cls, n: int, cells_per_axis: int) -> "Grid":
        return cls(n, (cells_per_axis,) * n, ((0.0, 1.0),) * n)

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.cells

    @property
    def ncells(self) -> int:
        return int(np.prod(self.cells))

    @property
    def h(self) -> Tuple[float, ...]:
        return tuple((hi - lo) / c for (lo, hi), c in zip(self.extents, self.cells))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.h))

    @property
    def volume(self) -> float:
        return float(np.prod([hi - lo for lo, hi in self.extents]))

    def face_area(self, axis: int) -> float:
        """Area of a face normal to ``axis``."""
        return self.cell_volume / self.h[axis]

    @property
    def surface_area(self) -> float:
        return float(sum(2.0 * self.volume / (hi - lo) for lo, hi in self.extents))

    def axis_centers(self, axis: int) -> FloatArray:
        lo, _ = self.extents[axis]
        return lo + (np.arange(self.cells[axis]) + 0.5) * self.h[axis]

    def axis_faces(self, axis: int) -> FloatArray:
        lo, _ = self.extents[axis]
        return lo + np.arange(self.cells[axis] + 1) * self.h[axis]

    def centers(self) -> List[FloatArray]:
        """Cell-center coordinates, one array of ``shape`` per axis."""
        axes = [self.axis_centers(k) for k in range(self.n)]
        return list(np.meshgrid(*axes, indexing="ij"))

    def face_shape(self, axis: int) -> Tuple[int, ...]:
        """Shape of the array of all faces normal to ``axis``, boundary included."""
        return tuple(c + 1 if k == axis else c for k, c in enumerate(self.cells))

    def face_centers(self, axis: int) -> List[FloatArray]:
        axes = [
            self.axis_faces(k) if k == axis else self.axis_centers(k)
            for k in range(self.n)
        ]
        return list(np.meshgrid(*axes, indexing="ij"))

    # Boundary faces are ordered axis by axis, low side before high side,
    # each block row-major over the remaining axes.

    def boundary_sides(self) -> List[Tuple[int, int]]:
        return [(k, side) for k in range(self.n) for side in (0, 1)]

    def boundary_block_size(self, axis: int) -> int:
        return int(np.prod([c for k, c in enumerate(self.cells) if k != axis]))

    @property
    def boundary_face_count(self) -> int:
        return sum(2 * self.boundary_block_size(k) for k in range(self.n))

    def boundary_face_areas(self) -> FloatArray:
        return np.concatenate(
            [
                np.full(self.boundary_block_size(k), self.face_area(k))
                for k, _ in self.boundary_sides()
            ]
        )

    def boundary_face_centers(self) -> List[FloatArray]:
        """Coordinates of every boundary face center, one flat array per axis."""
        coords: List[List[FloatArray]] = [[] for _ in range(self.n)]
        for k, side in self.boundary_sides():
            axes = []
            for j in range(self.n):
                if j == k:
                    axes.append(np.array([self.extents[k][side]]))
                else:
                    axes.append(self.axis_centers(j))
            mesh = np.meshgrid(*axes, indexing="ij")
            for j in range(self.n):
                coords[j].append(mesh[j].ravel())
        return [np.concatenate(c) for c in coords]

    def boundary_trace(self, cell_values: FloatArray) -> FloatArray:
        """Values of the cell adjacent to each boundary face."""
        values = np.asarray(cell_values).reshape(self.shape)
        return np.concatenate(
            [
                np.take(values, 0 if side == 0 else -1, axis=k).ravel()
                for k, side in self.boundary_sides()
            ]
        )

    def boundary_block(self, flat: FloatArray, axis: int, side: int) -> FloatArray:
        """Slice of a flat boundary array belonging to one side, reshaped."""
        offset = 0
        for k, s in self.boundary_sides():
            size = self.boundary_block_size(k)
            if (k, s) == (axis, side):
                shape = tuple(c for j, c in enumerate(self.cells) if j != axis)
                return np.asarray(flat[offset : offset + size]).reshape(shape)
            offset += size
        raise IndexError(f"no boundary side ({axis}, {side})")

    def describe(self) -> str:
        return f"{'x'.join(map(str, self.cells))} cells on {list(self.extents)}"


def _frozen_array(values: FloatArray) -> FloatArray:
    arr = np.array(values, dtype=np.float64, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SpatialField:
    """One real value per cell center."""

    grid: Grid
    values: FloatArray
    label: str = ""

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.size != self.grid.ncells:
            raise ConfigError(
                f"field '{self.label}' has {arr.size} values for "
                f"{self.grid.ncells} cells",
                Component.GRID.value,
            )
        arr = arr.reshape(self.grid.shape)
        if not np.all(np.isfinite(arr)):
            bad = tuple(int(i) for i in np.argwhere(~np.isfinite(arr))[0])
            raise ConfigError(
                f"field '{self.label}' is not finite at cell {bad}",
                Component.GRID.value,
            )
        object.__setattr__(self, "values", _frozen_array(arr))

    @classmethod
    def constant(cls, grid: Grid, value: float, label: str = "") -> "SpatialField":
        return cls(grid, np.full(grid.shape, float(value)), label)

    @classmethod
    def from_function(
        cls, grid: Grid, fn: PointwiseMap, label: str = ""
    ) -> "SpatialField":
        raw = np.asarray(fn(*grid.centers()), dtype=float)
        values = np.broadcast_to(raw, grid.shape)
        return cls(grid, values, label)

    @property
    def flat(self) -> FloatArray:
        return self.values.ravel()

    def min(self) -> float:
        return float(self.values.min())

    def max(self) -> float:
        return float(self.values.max())

    def with_values(
        self, values: FloatArray, label: Optional[str] = None
    ) -> "SpatialField":
        return SpatialField(self.grid, values, self.label if label is None else label)

    def require_positive(self, component: str) -> None:
        if np.any(self.values <= 0):
            bad = tuple(int(i) for i in np.argwhere(self.values <= 0)[0])
            raise ConfigError(
                f"field '{self.label}' must be positive; cell {bad} holds "
                f"{self.values[bad]!r}",
                component,
            )


@dataclass(frozen=True)
class BoundaryField:
    """One real per boundary face, optionally sampled at increasing times.

    Between samples the field is interpolated linearly in time; outside the
    sample range it is held constant.
    """

    grid: Grid
    values: FloatArray
    times: Optional[Tuple[float, ...]] = None
    label: str = ""

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=np.float64)
        nfaces = self.grid.boundary_face_count
        if self.times is None:
            if arr.size != nfaces:
                raise ConfigError(
                    f"boundary field '{self.label}' has {arr.size} values for "
                    f"{nfaces} faces",
                    Component.GRID.value,
                )
            arr = arr.reshape(nfaces)
        else:
            times = np.asarray(self.times, dtype=float)
            if times.ndim != 1 or times.size == 0 or np.any(np.diff(times) <= 0):
                raise ConfigError(
                    f"boundary field '{self.label}' needs strictly increasing times",
                    Component.GRID.value,
                )
            if arr.size != times.size * nfaces:
                raise ConfigError(
                    f"boundary field '{self.label}' needs {times.size}x{nfaces} values",
                    Component.GRID.value,
                )
            arr = arr.reshape(times.size, nfaces)
            object.__setattr__(self, "times", tuple(float(t) for t in times))
        if not np.all(np.isfinite(arr)):
            raise ConfigError(
                f"boundary field '{self.label}' is not finite", Component.GRID.value
            )
        object.__setattr__(self, "values", _frozen_array(arr))

    @classmethod
    def constant(cls, grid: Grid, value: float, label: str = "") -> "BoundaryField":
        return cls(grid, np.full(grid.boundary_face_count, float(value)), None, label)

    @property
    def is_static(self) -> bool:
        return self.times is None

    def at(self, t: float) -> FloatArray:
        if self.times is None:
            return self.values
        times = np.asarray(self.times)
        if t <= times[0]:
            return self.values[0]
        if t >= times[-1]:
            return self.values[-1]
        j = int(np.searchsorted(times, t, side="right")) - 1
        w = (t - times[j]) / (times[j + 1] - times[j])
        return (1.0 - w) * self.values[j] + w * self.values[j + 1]

    def negative_part(self, t: float) -> FloatArray:
        return np.maximum(-self.at(t), 0.0)

    def sample_times(self, t_final: float) -> FloatArray:
        """Sample grid on [0, t_final]: the stored times clipped, plus both ends."""
        pts = [0.0, float(t_final)]
        if self.times is not None:
            pts.extend(t for t in self.times if 0.0 < t < t_final)
        return np.unique(np.asarray(pts, dtype=float))

    def min(self) -> float:
        return float(self.values.min())


@dataclass(frozen=True)
class TimeSeries:
    """Strictly increasing sample times with one finite value each."""

    times: FloatArray
    values: FloatArray
    label: str = ""
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        t = np.asarray(self.times, dtype=float).ravel()
        v = np.asarray(self.values, dtype=float).ravel()
        if t.size != v.size:
            raise ConfigError(
                f"time series '{self.label}' has {t.size} times, {v.size} values",
                Component.GRID.value,
            )
        if np.any(np.diff(t) <= 0):
            raise ConfigError(
                f"time series '{self.label}' times must be strictly increasing",
                Component.GRID.value,
            )
        if not np.all(np.isfinite(v)):
            raise ConfigError(
                f"time series '{self.label}' holds non-finite values",
                Component.GRID.value,
            )
        object.__setattr__(self, "times", _frozen_array(t))
        object.__setattr__(self, "values", _frozen_array(v))

    @classmethod
    def from_lists(
        cls, times: Sequence[float], values: Sequence[float], label: str = ""
    ) -> "TimeSeries":
        return cls(
            np.asarray(times, dtype=float), np.asarray(values, dtype=float), label
        )

    def __len__(self) -> int:
        return int(self.times.size)
