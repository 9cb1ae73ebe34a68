"""Test functions for time grids and noise streams."""

import pytest

import numpy as np

from mrsde.common.exceptions import GridMismatchError
from mrsde.common.grid import TimeGrid
from mrsde.common.noise import NoiseStream


@pytest.mark.parametrize("horizon,n_steps", [(1.0, 10), (2.5, 7), (1e-3, 1)])
def test_nodes(horizon: float, n_steps: int) -> None:
    """Test nodes are uniform and end exactly at the horizon."""
    grid = TimeGrid(horizon, n_steps)

    assert grid.nodes.shape == (n_steps + 1,)
    assert grid.nodes[0] == 0.0
    assert grid.nodes[-1] == horizon
    assert np.allclose(np.diff(grid.nodes), grid.dt)


@pytest.mark.parametrize("horizon,n_steps", [(0.0, 10), (-1.0, 10), (np.inf, 10), (1.0, 0)])
def test_grid_fail(horizon: float, n_steps: int) -> None:
    """Test invalid grids."""
    with pytest.raises(ValueError):
        _ = TimeGrid(horizon, n_steps)


def test_check_path() -> None:
    """Test path length checks."""
    grid = TimeGrid(1.0, 4)

    assert grid.check_path([0, 1, 2, 3, 4], "x").dtype == np.float64
    with pytest.raises(GridMismatchError):
        _ = grid.check_path(np.zeros(4), "x")


def test_prefix() -> None:
    """Test prefix grids share the step size."""
    grid = TimeGrid(2.0, 20)
    prefix = grid.prefix(5)

    assert prefix.n_steps == 5
    assert np.isclose(prefix.dt, grid.dt)
    assert np.isclose(prefix.horizon, 0.5)


def test_noise_prefix_stable() -> None:
    """Test particle i gets the same draw whatever the number of particles."""
    noise = NoiseStream(seed=42, stream=3)

    few = noise.normals(step=7, n=10)
    many = noise.normals(step=7, n=10_000)

    assert np.array_equal(few, many[:10])


def test_noise_order_free() -> None:
    """Test draws do not depend on the order in which steps are generated."""
    noise = NoiseStream(seed=1)
    forward = [noise.normals(step, 5) for step in range(4)]
    backward = [noise.normals(step, 5) for step in reversed(range(4))][::-1]

    for a, b in zip(forward, backward, strict=True):
        assert np.array_equal(a, b)


@pytest.mark.parametrize(
    "first,second",
    [
        ((0, 0, 0), (1, 0, 0)),
        ((0, 0, 0), (0, 1, 0)),
        ((0, 0, 0), (0, 0, 1)),
    ],
)
def test_noise_keys_distinct(first: tuple[int, int, int], second: tuple[int, int, int]) -> None:
    """Test different seeds, streams and steps give different draws."""
    a = NoiseStream(first[0], first[1]).normals(first[2], 100)
    b = NoiseStream(second[0], second[1]).normals(second[2], 100)

    assert not np.array_equal(a, b)


def test_path_increments() -> None:
    """Test single-particle paths pick draw i of each step."""
    noise = NoiseStream(seed=5)
    dt = 0.01
    path = noise.path_increments(n_steps=6, dt=dt, particle=2)
    expected = [noise.increments(step, 3, dt)[2] for step in range(6)]

    assert np.array_equal(path, expected)


@pytest.mark.parametrize("seed,stream", [(-1, 0), (2**64, 0), (0, -1), (0, 2**32)])
def test_noise_fail(seed: int, stream: int) -> None:
    """Test out of range seeds and streams."""
    with pytest.raises(ValueError):
        _ = NoiseStream(seed, stream)
