"""Weight fields W1, W2, W3 derived from a Forchheimer law."""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..core.grid import SpatialField
from ..types.common import FloatArray, IntArray
from .base import Component, ConstitutiveError
from .forchheimer import ForchheimerLaw


@dataclass(frozen=True)
class WeightFields:
    Mstar: SpatialField  # max_i a_i
    mstar: SpatialField  # min(a_0, a_N)
    W1: SpatialField
    W2: SpatialField
    W3: SpatialField
    degeneracy: float


def compute_weights(law: ForchheimerLaw) -> WeightFields:
    """W1 = a_N^a / (2 N M*), W2 = N M* / (a_N^{1-a} m*) and
    W3 = W1 + W2^{2-a} / W1^{1-a}."""
    coef = np.stack([c.values for c in law.coefficients])
    a0, aN = coef[0], coef[-1]
    if np.any(a0 <= 0) or np.any(aN <= 0):
        raise ConstitutiveError(
            "weights need a_0 > 0 and a_N > 0 at every cell",
            Component.CONSTITUTIVE.value,
        )
    a = law.degeneracy
    N = law.order
    big = coef.max(axis=0)
    small = np.minimum(a0, aN)
    w1 = aN**a / (2.0 * N * big)
    w2 = N * big / (aN ** (1.0 - a) * small)
    w3 = w1 + w2 ** (2.0 - a) / w1 ** (1.0 - a)
    grid = law.grid
    return WeightFields(
        SpatialField(grid, big, "M*"),
        SpatialField(grid, small, "m*"),
        SpatialField(grid, w1, "W1"),
        SpatialField(grid, w2, "W2"),
        SpatialField(grid, w3, "W3"),
        a,
    )


def k_sandwich(
    weights: WeightFields, aN: FloatArray, cells: IntArray, xi: FloatArray
) -> Tuple[FloatArray, FloatArray]:
    """2 W1 / (xi^a + a_N^a) <= K(x, xi) <= W2 xi^{-a} at the given flat cells."""
    a = weights.degeneracy
    an = np.asarray(aN).ravel()[cells]
    lower = 2.0 * weights.W1.flat[cells] / (xi**a + an**a)
    with np.errstate(divide="ignore"):
        upper = weights.W2.flat[cells] * xi ** (-a)
    return lower, upper


def flux_sandwich(
    weights: WeightFields, aN: FloatArray, cells: IntArray, ymag: FloatArray
) -> Tuple[FloatArray, FloatArray]:
    """W1 |y|^{2-a} - a_N / 2 <= X(x, y).y <= W2 |y|^{2-a} at the given flat cells."""
    a = weights.degeneracy
    an = np.asarray(aN).ravel()[cells]
    lower = weights.W1.flat[cells] * ymag ** (2.0 - a) - 0.5 * an
    upper = weights.W2.flat[cells] * ymag ** (2.0 - a)
    return lower, upper
