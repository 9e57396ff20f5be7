"""Field specs (constant, csv, preset) and the grid CSV interchange format.

A field CSV has a three-line header followed by the values in row-major
order, one row per index of the leading axes:

    # dims,<n>,<N_1>,...,<N_n>
    # extents,<lo_1>,<hi_1>,...,<lo_n>,<hi_n>
    # label,<free text>
"""

import re
from pathlib import Path
from typing import Callable, Dict, Optional, Sequence, Tuple, Union

import numpy as np

from ..models.base import Component, ConfigError
from ..types.common import FieldSpec, FloatArray
from .grid import BoundaryField, Grid, SpatialField
from .presets import PresetRegistry

_SPEC = re.compile(r"^\s*(constant|csv|preset)\s*:\s*(.+?)\s*$")
_PRESET = re.compile(r"^([A-Za-z_][\w-]*)\s*(?:\((.*)\))?$")

PathLike = Union[str, Path]


def parse_field_spec(spec: FieldSpec) -> Tuple[str, str]:
    """Split a spec into (kind, payload); kind is constant, csv or preset."""
    match = _SPEC.match(spec)
    if not match:
        raise ConfigError(
            f"field spec '{spec}' must be constant:<v>, csv:<path> or "
            "preset:<id>(args)",
            Component.CLI.value,
        )
    return match.group(1), match.group(2)


def parse_preset(payload: str) -> Tuple[str, Dict[str, float]]:
    match = _PRESET.match(payload)
    if not match:
        raise ConfigError(f"malformed preset '{payload}'", Component.CLI.value)
    name = PresetRegistry.resolve_field_alias(match.group(1))
    if not PresetRegistry.is_valid_field(name):
        raise ConfigError(
            f"unknown field preset '{match.group(1)}'; choose from "
            f"{PresetRegistry.get_all_field_names()}",
            Component.CLI.value,
        )
    raw = match.group(2)
    try:
        args = [float(a) for a in raw.split(",")] if raw and raw.strip() else []
        return name, PresetRegistry.bind_field_args(name, args)
    except ValueError as e:
        raise ConfigError(f"preset '{payload}': {e}", Component.CLI.value, e) from e


def _one(coords: Sequence[FloatArray], grid: Grid, **_: float) -> FloatArray:
    return np.ones_like(coords[0])


def _linear_x(coords: Sequence[FloatArray], grid: Grid, **_: float) -> FloatArray:
    return np.array(coords[0], dtype=float)


def _gauss_bump(
    coords: Sequence[FloatArray],
    grid: Grid,
    cx: float,
    cy: float,
    sigma: float,
    amp: float,
    base: float,
) -> FloatArray:
    centre = [cx, cy] + [0.5 * (lo + hi) for lo, hi in grid.extents[2:]]
    dist2 = sum((c - x0) ** 2 for c, x0 in zip(coords, centre))
    return base + amp * np.exp(-dist2 / (2.0 * sigma * sigma))


def _checker(
    coords: Sequence[FloatArray], grid: Grid, v0: float, v1: float, blocks: float
) -> FloatArray:
    nb = max(1, int(blocks))
    parity = np.zeros(np.shape(coords[0]), dtype=int)
    for c, (lo, hi) in zip(coords, grid.extents):
        idx = np.clip(np.floor((c - lo) / (hi - lo) * nb).astype(int), 0, nb - 1)
        parity = parity + idx
    return np.where(parity % 2 == 0, v0, v1).astype(float)


_EVALUATORS: Dict[str, Callable[..., FloatArray]] = {
    "one": _one,
    "linear_x": _linear_x,
    "gauss_bump": _gauss_bump,
    "checker": _checker,
}


def evaluate_preset(
    payload: str, coords: Sequence[FloatArray], grid: Grid
) -> FloatArray:
    name, params = parse_preset(payload)
    return _EVALUATORS[name](coords, grid, **params)


def _resolve_path(path: str, base_dir: Optional[PathLike]) -> Path:
    p = Path(path)
    if not p.is_absolute() and base_dir is not None:
        p = Path(base_dir) / p
    if not p.exists():
        raise ConfigError(f"field file not found: {p}", Component.CLI.value)
    return p


def _constant(payload: str, spec: str) -> float:
    try:
        return float(payload)
    except ValueError as e:
        raise ConfigError(
            f"bad constant in field spec '{spec}'", Component.CLI.value, e
        ) from e


def resolve_field(
    spec: FieldSpec, grid: Grid, label: str = "", base_dir: Optional[PathLike] = None
) -> SpatialField:
    """Materialize a cell field from its spec."""
    kind, payload = parse_field_spec(spec)
    if kind == "constant":
        return SpatialField.constant(grid, _constant(payload, spec), label)
    if kind == "csv":
        loaded = read_field_csv(_resolve_path(payload, base_dir), grid)
        return loaded.with_values(loaded.values, label or loaded.label)
    return SpatialField(grid, evaluate_preset(payload, grid.centers(), grid), label)


def resolve_boundary_field(
    spec: FieldSpec,
    grid: Grid,
    label: str = "",
    base_dir: Optional[PathLike] = None,
    times: Optional[Sequence[float]] = None,
    scales: Optional[Sequence[float]] = None,
) -> BoundaryField:
    """Materialize a boundary field, evaluated at boundary face centers.

    With ``times`` and ``scales`` the spatial profile is multiplied by a
    piecewise-linear amplitude. A csv spec holds one row of face values, or
    rows of ``t, v_1, ..., v_F`` for a time-sampled field.
    """
    kind, payload = parse_field_spec(spec)
    nfaces = grid.boundary_face_count
    if kind == "csv":
        data = np.atleast_2d(
            np.loadtxt(_resolve_path(payload, base_dir), delimiter=",", comments="#")
        )
        if data.shape[1] == nfaces and data.shape[0] == 1:
            profile = data[0]
        elif data.shape[1] == nfaces + 1:
            if times is not None:
                raise ConfigError(
                    "a time-sampled boundary csv cannot be combined with psi_times",
                    Component.CLI.value,
                )
            return BoundaryField(grid, data[:, 1:], tuple(data[:, 0]), label)
        else:
            raise ConfigError(
                f"boundary csv needs {nfaces} or {nfaces + 1} columns, "
                f"got {data.shape[1]}",
                Component.CLI.value,
            )
    elif kind == "constant":
        profile = np.full(nfaces, _constant(payload, spec))
    else:
        profile = evaluate_preset(payload, grid.boundary_face_centers(), grid)

    if times is None:
        if scales is not None:
            raise ConfigError("psi_scales needs psi_times", Component.CLI.value)
        return BoundaryField(grid, profile, None, label)
    amp = np.ones(len(times)) if scales is None else np.asarray(scales, dtype=float)
    if amp.size != len(times):
        raise ConfigError(
            f"{len(times)} psi_times but {amp.size} psi_scales", Component.CLI.value
        )
    return BoundaryField(grid, np.outer(amp, profile), tuple(times), label)


def write_field_csv(field: SpatialField, path: PathLike) -> Path:
    grid = field.grid
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    rows = field.values.reshape(-1, grid.cells[-1])
    with out.open("w", encoding="utf-8") as fh:
        fh.write("# dims," + ",".join(str(v) for v in (grid.n, *grid.cells)) + "\n")
        fh.write(
            "# extents,"
            + ",".join(f"{v:.17g}" for lohi in grid.extents for v in lohi)
            + "\n"
        )
        fh.write(f"# label,{field.label}\n")
        np.savetxt(fh, rows, fmt="%.17g", delimiter=",")
    return out


def read_field_csv(path: PathLike, grid: Optional[Grid] = None) -> SpatialField:
    p = Path(path)
    with p.open(encoding="utf-8") as fh:
        header = [fh.readline().rstrip("\n") for _ in range(3)]
    try:
        dims = [int(v) for v in header[0].split(",")[1:]]
        ext = [float(v) for v in header[1].split(",")[1:]]
        label = header[2].split(",", 1)[1] if "," in header[2] else ""
        file_grid = Grid(
            dims[0],
            tuple(dims[1:]),
            tuple((ext[2 * k], ext[2 * k + 1]) for k in range(dims[0])),
        )
    except (IndexError, ValueError) as e:
        raise ConfigError(
            f"bad field csv header in {p}: {e}", Component.CLI.value, e
        ) from e
    if grid is not None and (grid.cells, grid.n) != (file_grid.cells, file_grid.n):
        raise ConfigError(
            f"field csv {p} is {file_grid.describe()}, expected {grid.describe()}",
            Component.CLI.value,
        )
    values = np.loadtxt(p, delimiter=",", comments="#", ndmin=2)
    return SpatialField(grid or file_grid, values.ravel(), label)

