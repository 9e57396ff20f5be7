"""Seeded test-function families with exact gradients and boundary traces."""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from ..core.grid import Grid, SpatialField
from ..types.common import FloatArray

# Fourier modes summed per generated member
MODES_PER_MEMBER = 3
BUMP_SIGMA = 0.1


@dataclass(frozen=True)
class Sample:
    """A function sampled on a grid: cell values, cell gradients, boundary values.

    ``gradient`` is None for plain fields; grad energies then fall back to the
    face-based discrete gradient and the boundary holds adjacent cell values.
    """

    grid: Grid
    values: FloatArray
    boundary: FloatArray
    gradient: Optional[FloatArray] = None
    label: str = ""

    @classmethod
    def from_field(cls, u: SpatialField) -> "Sample":
        return cls(u.grid, u.values, u.grid.boundary_trace(u.values), None, u.label)

    def scaled(self, factor: float, shift: float = 0.0) -> "Sample":
        """shift + factor * self."""
        grad = None if self.gradient is None else factor * self.gradient
        return Sample(
            self.grid,
            shift + factor * self.values,
            shift + factor * self.boundary,
            grad,
            self.label,
        )


@dataclass(frozen=True)
class FamilyMember:
    """f(xi) on the unit-normalized box; kind is constant, linear, bump or fourier."""

    index: int
    kind: str
    wavenumbers: FloatArray = field(default_factory=lambda: np.zeros((0, 0)))
    phases: FloatArray = field(default_factory=lambda: np.zeros((0, 0)))
    weights: FloatArray = field(default_factory=lambda: np.zeros(0))

    @property
    def function_id(self) -> str:
        return f"{self.kind}-{self.index}"

    def _evaluate(self, xi: Sequence[FloatArray]) -> List[FloatArray]:
        """Value and d/dxi_j, one array each, at normalized coordinates."""
        n = len(xi)
        zero = np.zeros_like(xi[0], dtype=float)
        if self.kind == "constant":
            return [zero + 1.0] + [zero.copy() for _ in range(n)]
        if self.kind == "linear":
            return [np.array(xi[0], dtype=float), zero + 1.0] + [
                zero.copy() for _ in range(n - 1)
            ]
        if self.kind == "bump":
            d2 = sum((x - 0.5) ** 2 for x in xi)
            val = np.exp(-d2 / (2.0 * BUMP_SIGMA**2))
            return [val] + [-(x - 0.5) / BUMP_SIGMA**2 * val for x in xi]
        out = [zero.copy() for _ in range(n + 1)]
        for k, phi, c in zip(self.wavenumbers, self.phases, self.weights):
            cosines = [np.cos(np.pi * k[d] * xi[d] + phi[d]) for d in range(n)]
            out[0] = out[0] + c * np.prod(cosines, axis=0)
            for j in range(n):
                term = -np.pi * k[j] * np.sin(np.pi * k[j] * xi[j] + phi[j])
                for d in range(n):
                    if d != j:
                        term = term * cosines[d]
                out[j + 1] = out[j + 1] + c * term
        return out

    def sample(self, grid: Grid) -> Sample:
        lengths = [hi - lo for lo, hi in grid.extents]

        def normalized(coords: Sequence[FloatArray]) -> List[FloatArray]:
            return [
                (c - lo) / L for c, (lo, _), L in zip(coords, grid.extents, lengths)
            ]

        cells = self._evaluate(normalized(grid.centers()))
        faces = self._evaluate(normalized(grid.boundary_face_centers()))
        gradient = np.stack([g / L for g, L in zip(cells[1:], lengths)])
        return Sample(grid, cells[0], faces[0], gradient, self.function_id)


@dataclass(frozen=True)
class TestFunctionFamily:
    """Deterministic family: optional constant, linear and bump, then Fourier sums.

    Member i draws from a generator seeded with (seed, i), so a larger count
    only appends members.
    """

    __test__ = False  # not a pytest class

    seed: int = 42
    count: int = 64
    max_frequency: int = 4
    decay: float = 2.0
    include_constant: bool = True
    include_linear: bool = True
    include_bump: bool = True

    def members(self, n: int) -> List[FamilyMember]:
        fixed = [
            kind
            for kind, on in (
                ("constant", self.include_constant),
                ("linear", self.include_linear),
                ("bump", self.include_bump),
            )
            if on
        ]
        out: List[FamilyMember] = []
        for i in range(self.count):
            if i < len(fixed):
                out.append(FamilyMember(i, fixed[i]))
                continue
            rng = np.random.default_rng([self.seed, i])
            k = rng.integers(0, self.max_frequency + 1, size=(MODES_PER_MEMBER, n))
            phases = rng.uniform(0.0, 2.0 * np.pi, size=(MODES_PER_MEMBER, n))
            norms = np.sqrt(np.sum(k.astype(float) ** 2, axis=1))
            weights = rng.uniform(-1.0, 1.0, size=MODES_PER_MEMBER) / (
                1.0 + norms
            ) ** self.decay
            out.append(FamilyMember(i, "fourier", k.astype(float), phases, weights))
        return out

    def describe(self) -> str:
        return (
            f"seed={self.seed} count={self.count} max_frequency={self.max_frequency} "
            f"decay={self.decay} constant={self.include_constant} "
            f"linear={self.include_linear} bump={self.include_bump}"
        )
