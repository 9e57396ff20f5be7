"""Common type definitions used across forchbound."""

from typing import Callable, Dict, Tuple, Union

import numpy as np
import numpy.typing as npt

# Array types
FloatArray = npt.NDArray[np.float64]
IntArray = npt.NDArray[np.int64]

# Grid addressing
CellIndex = Union[int, Tuple[int, ...]]
Extent = Tuple[float, float]

# Field specs as written in scenario files: constant:<v>, csv:<path>, preset:<id>(...)
FieldSpec = str

# Pointwise maps over cell centers: one coordinate array per axis -> values
PointwiseMap = Callable[..., FloatArray]

# Report payloads
ReportDict = Dict[str, object]
