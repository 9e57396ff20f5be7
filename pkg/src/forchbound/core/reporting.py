"""JSON and CSV writers shared by every command.

Floats are written with %.17g; non-finite floats become the strings
"inf", "-inf" and "nan" so the JSON stays strict.
"""

import csv
import dataclasses
import hashlib
import json
import math
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence

import numpy as np

from ..models.base import Component, ConfigError
from .lognum import LogNumber

MARGIN_COLUMNS = (
    "check_name",
    "function_id",
    "param_id",
    "lhs",
    "rhs",
    "margin",
    "pass",
)


def format_float(x: float) -> str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return "%.17g" % x


def to_jsonable(obj: Any) -> Any:
    """Plain JSON types for dataclasses, numpy values, LogNumbers and paths."""
    if isinstance(obj, LogNumber):
        return {"value": to_jsonable(obj.value), "log": to_jsonable(obj.log)}
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else format_float(x)
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, Path):
        return str(obj)
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        if hasattr(obj, "to_dict"):
            return to_jsonable(obj.to_dict())
        return {
            f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)
        }
    if isinstance(obj, Mapping):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    return obj


def canonical_json(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, separators=(",", ":"))


def sha256_of(obj: Any) -> str:
    return hashlib.sha256(canonical_json(obj).encode("utf-8")).hexdigest()


def _prepare(path: Path) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise ConfigError(
            f"cannot create output directory {path.parent}: {e}",
            Component.CLI.value,
            e,
        ) from e
    return path


def write_json(path: Path, payload: Any) -> Path:
    path = _prepare(path)
    path.write_text(
        json.dumps(to_jsonable(payload), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    return path


def _cell(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return format_float(float(value))
    if isinstance(value, LogNumber):
        return format_float(value.value)
    return str(value)


def write_csv(
    path: Path,
    columns: Sequence[str],
    rows: Iterable[Sequence[Any]],
    meta: Optional[Mapping[str, Any]] = None,
) -> Path:
    """Header row then one row per record; ``meta`` goes first as "# key=value"."""
    path = _prepare(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        for key, value in sorted((meta or {}).items()):
            fh.write(f"# {key}={_cell(value)}\n")
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            if len(row) != len(columns):
                raise ConfigError(
                    f"{path.name}: row of {len(row)} cells for {len(columns)} columns",
                    Component.CLI.value,
                )
            writer.writerow([_cell(v) for v in row])
    return path


def write_margins_csv(
    path: Path, records: Iterable[Any], meta: Optional[Mapping[str, Any]] = None
) -> Path:
    """One row per check record, in the given (sorted) order."""
    rows = (
        (r.check_name, r.function_id, r.param_id, r.lhs, r.rhs, r.margin, r.passed)
        for r in records
    )
    return write_csv(path, MARGIN_COLUMNS, rows, meta)


def read_csv(path: Path) -> List[Dict[str, str]]:
    """Rows as dicts; "#" lines before the header are skipped."""
    with Path(path).open(newline="", encoding="utf-8") as fh:
        lines = [line for line in fh if not line.startswith("#")]
    return list(csv.DictReader(lines))


def read_csv_meta(path: Path) -> Dict[str, str]:
    out: Dict[str, str] = {}
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            if not line.startswith("# "):
                break
            key, _, value = line[2:].rstrip("\n").partition("=")
            out[key] = value
    return out
