import numpy as np
import pytest

from forchbound.core.grid import Grid
from forchbound.harness.family import TestFunctionFamily


def test_fixed_members_come_first() -> None:
    members = TestFunctionFamily(count=5).members(2)
    assert [m.kind for m in members] == [
        "constant",
        "linear",
        "bump",
        "fourier",
        "fourier",
    ]
    assert members[3].function_id == "fourier-3"
    kinds = TestFunctionFamily(count=2, include_constant=False).members(2)
    assert [m.kind for m in kinds] == ["linear", "bump"]


def test_seeded_and_append_only(grid8: Grid) -> None:
    short = TestFunctionFamily(seed=7, count=6).members(2)
    long = TestFunctionFamily(seed=7, count=12).members(2)
    for a, b in zip(short, long):
        np.testing.assert_array_equal(a.sample(grid8).values, b.sample(grid8).values)
    other = TestFunctionFamily(seed=8, count=6).members(2)
    assert not np.array_equal(
        short[5].sample(grid8).values, other[5].sample(grid8).values
    )


def test_exact_gradients_match_finite_differences() -> None:
    grid = Grid(2, (64, 64), ((0.0, 2.0), (0.0, 1.0)))
    for member in TestFunctionFamily(seed=3, count=8).members(2):
        sample = member.sample(grid)
        assert sample.gradient is not None
        fd = np.gradient(sample.values, *grid.h)
        interior = (slice(2, -2), slice(2, -2))
        for k in range(2):
            scale = max(1.0, float(np.abs(sample.gradient[k]).max()))
            err = np.abs(fd[k][interior] - sample.gradient[k][interior]).max()
            assert err <= 0.05 * scale, member.function_id


def test_boundary_values_of_the_linear_member(grid8: Grid) -> None:
    sample = TestFunctionFamily(count=2).members(2)[1].sample(grid8)
    low = grid8.boundary_block(sample.boundary, 0, 0)
    high = grid8.boundary_block(sample.boundary, 0, 1)
    np.testing.assert_allclose(low, 0.0)
    np.testing.assert_allclose(high, 1.0)
    assert sample.scaled(2.0, 1.0).boundary.max() == pytest.approx(3.0)
