"""Test functions for path rates."""

from typing import Any

import pytest

import numpy as np

from mrsde.common.exceptions import DegenerateDiffusionError
from mrsde.common.grid import TimeGrid
from mrsde.model import ModelSpec
from mrsde.rate import path_rate, short_path_rate
from mrsde.skeleton import ControlPath, DeterministicPath, solve_mr_ode, solve_skeleton

N_CONTROLS = 100


@pytest.mark.parametrize("c", [0.0, 0.5, -2.0])
def test_schilder_line(schilder: ModelSpec, c: float) -> None:
    """Test the straight line c t costs c^2 T / 2."""
    grid = TimeGrid(1.0, 200)
    g = DeterministicPath.unreflected(grid, c * grid.nodes)
    result = path_rate(schilder, g, np.zeros(201))

    assert result.value == pytest.approx(0.5 * c**2, abs=grid.dt)
    assert np.allclose(result.control.phi, c)  # type: ignore[union-attr]


@pytest.mark.parametrize(
    "fixture", ["closed_form", "ornstein_uhlenbeck", "schilder", "sin_affine"]
)
def test_rate_of_skeleton(fixture: str, request: Any, spec_factory: Any) -> None:
    """Test I(Y^phi) matches the energy of phi for random piecewise-constant controls."""
    if fixture == "sin_affine":
        spec = spec_factory(
            ("sin-affine", [-0.5, 0.3]),
            ("constant", [0.8]),
            ("sin-affine-monotone", [2.0, 1.0]),
            sigma_floor=0.8,
        )
    else:
        spec = request.getfixturevalue(fixture)
    grid = TimeGrid(spec.horizon, 100)
    k0 = solve_mr_ode(spec, grid).k
    rng = np.random.default_rng(0)

    for _ in range(N_CONTROLS):
        pieces = rng.normal(0.0, 1.0, 5)
        phi = ControlPath(grid, np.repeat(pieces, grid.n_steps // 5))
        g = solve_skeleton(spec, grid, phi, k0)
        result = path_rate(spec, g, k0)

        assert result.value - phi.energy <= 5.0 * grid.dt * (1.0 + phi.energy)
        assert result.finite


def test_wrong_start(schilder: ModelSpec) -> None:
    """Test paths not starting at xi have infinite rate."""
    grid = TimeGrid(1.0, 10)
    result = path_rate(schilder, DeterministicPath.unreflected(grid, np.ones(11)), np.zeros(11))

    assert result.value == np.inf
    assert not result.finite
    assert result.control is None


def test_degenerate(geometric: ModelSpec) -> None:
    """Test rates need sigma_floor > 0."""
    grid = TimeGrid(1.0, 10)

    with pytest.raises(DegenerateDiffusionError):
        _ = path_rate(geometric, DeterministicPath.unreflected(grid, np.ones(11)), np.zeros(11))


def test_sigma_vanishes_on_path(spec_factory: Any) -> None:
    """Test a path through a zero of sigma is rejected."""
    spec = spec_factory(
        ("constant", [0.0]),
        ("affine", [0.0, 1.0]),
        ("affine", [5.0, 1.0]),
        xi=1.0,
        sigma_floor=0.5,
    )
    grid = TimeGrid(1.0, 2)

    with pytest.raises(DegenerateDiffusionError):
        _ = path_rate(spec, DeterministicPath.unreflected(grid, [1.0, 0.0, 1.0]), np.zeros(3))


def test_short_path_rate(closed_form: ModelSpec) -> None:
    """Test the short-time rate ignores drift and reflection."""
    grid = TimeGrid(1.0, 50)
    g = DeterministicPath.unreflected(grid, 0.4 * grid.nodes)

    assert short_path_rate(closed_form, g).value == pytest.approx(0.08)


def test_short_path_rate_horizon(closed_form: ModelSpec) -> None:
    """Test short-time rates need the unit horizon."""
    grid = TimeGrid(2.0, 10)

    with pytest.raises(ValueError):
        _ = short_path_rate(closed_form, DeterministicPath.unreflected(grid, np.zeros(11)))
