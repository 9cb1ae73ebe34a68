"""Test functions for deterministic limits, skeletons and controls."""

from typing import Any

import pytest

import numpy as np

from mrsde.common.exceptions import GridMismatchError
from mrsde.common.grid import TimeGrid
from mrsde.model import ModelSpec
from mrsde.skeleton import (
    ControlPath,
    DeterministicPath,
    solve_mr_ode,
    solve_short_mr_ode,
    solve_short_skeleton,
    solve_skeleton,
)


def test_mr_ode_closed_form(closed_form: ModelSpec) -> None:
    """Test K0_t = t and X0_t = 0 for b = -1, xi = 0, h = identity."""
    grid = TimeGrid(1.0, 100)
    limit = solve_mr_ode(closed_form, grid)

    assert np.allclose(limit.k, grid.nodes)
    assert np.allclose(limit.x, 0.0, atol=1e-12)
    assert limit.flatness_residual(closed_form.h) <= 1e-12
    assert limit.constraint_floor(closed_form.h) >= -1e-12


def test_mr_ode_static(static: ModelSpec) -> None:
    """Test no drift gives the constant path."""
    limit = solve_mr_ode(static, TimeGrid(1.0, 10))

    assert np.array_equal(limit.x, np.ones(11))
    assert np.array_equal(limit.k, np.zeros(11))


def test_mr_ode_slack(ornstein_uhlenbeck: ModelSpec) -> None:
    """Test an inactive constraint leaves the ODE unreflected."""
    grid = TimeGrid(1.0, 50)
    limit = solve_mr_ode(ornstein_uhlenbeck, grid)

    assert np.array_equal(limit.k, np.zeros(51))
    assert np.allclose(limit.x, 0.0)


@pytest.mark.parametrize("fixture", ["closed_form", "schilder", "geometric"])
def test_short_mr_ode(fixture: str, request: pytest.FixtureRequest) -> None:
    """Test the short-time limit stays at (xi, 0)."""
    spec = request.getfixturevalue(fixture)
    limit = solve_short_mr_ode(spec, TimeGrid(1.0, 20))

    assert np.all(limit.x == spec.xi)
    assert np.all(limit.k == 0.0)


@pytest.mark.parametrize("c", [-1.0, 0.0, 0.5, 2.0])
def test_skeleton_schilder(schilder: ModelSpec, c: float) -> None:
    """Test a constant control c gives the straight line c t."""
    grid = TimeGrid(1.0, 100)
    path = solve_skeleton(schilder, grid, ControlPath.constant(grid, c), np.zeros(101))

    assert np.allclose(path.x, c * grid.nodes)


def test_skeleton_closed_form(closed_form: ModelSpec) -> None:
    """Test the reflection path cancels the drift for b = -1."""
    grid = TimeGrid(1.0, 100)
    k0 = solve_mr_ode(closed_form, grid).k
    path = solve_skeleton(closed_form, grid, ControlPath.constant(grid, 0.3), k0)

    assert np.allclose(path.x, 0.3 * grid.nodes)
    assert np.array_equal(path.k, k0)


def test_short_skeleton(closed_form: ModelSpec) -> None:
    """Test the short-time skeleton ignores drift and reflection."""
    grid = TimeGrid(1.0, 100)
    path = solve_short_skeleton(closed_form, grid, ControlPath.constant(grid, -0.4))

    assert np.allclose(path.x, -0.4 * grid.nodes)


def test_short_skeleton_horizon(closed_form: ModelSpec) -> None:
    """Test the short-time skeleton needs the unit horizon."""
    grid = TimeGrid(2.0, 10)

    with pytest.raises(ValueError):
        _ = solve_short_skeleton(closed_form, grid, ControlPath.zero(grid))


def test_skeleton_grid_mismatch(schilder: ModelSpec) -> None:
    """Test controls and reflection paths must match the grid."""
    grid = TimeGrid(1.0, 10)

    with pytest.raises(GridMismatchError):
        _ = solve_skeleton(schilder, grid, ControlPath.zero(TimeGrid(1.0, 20)), np.zeros(11))
    with pytest.raises(GridMismatchError):
        _ = solve_skeleton(schilder, grid, ControlPath.zero(grid), np.zeros(5))


def test_control_energy() -> None:
    """Test energy and the scaling identity E(c phi) = c^2 E(phi)."""
    grid = TimeGrid(2.0, 4)
    phi = ControlPath(grid, np.array([1.0, -1.0, 2.0, 0.0]))

    assert phi.energy == pytest.approx(0.5 * 6.0 * 0.5)
    assert phi.scaled(3.0).energy == pytest.approx(9.0 * phi.energy)
    assert ControlPath.zero(grid).energy == 0.0


@pytest.mark.parametrize(
    "values,bound",
    [(np.zeros(3), None), (np.array([0.0, np.inf, 0.0, 0.0]), None), (np.ones(4), 0.1)],
)
def test_control_fail(values: np.ndarray, bound: float | None) -> None:
    """Test wrong shape, non-finite values and energy above the declared bound."""
    with pytest.raises(ValueError):
        _ = ControlPath(TimeGrid(1.0, 4), values, bound)


def test_paths_frozen() -> None:
    """Test paths copy their inputs and are read only."""
    grid = TimeGrid(1.0, 2)
    x = np.array([0.0, 1.0, 2.0])
    path = DeterministicPath.unreflected(grid, x)
    x[0] = 5.0

    assert path.x[0] == 0.0
    assert np.array_equal(path.u, path.x)
    with pytest.raises(ValueError):
        path.x[1] = 0.0


@pytest.fixture
def reflected_decay(spec_factory: Any) -> ModelSpec:
    """b(x) = -x, xi = 1, h(z) = z - 0.5: X0 = max(exp(-t), 0.5), K0 = 0.5 (t - ln 2)^+."""
    spec: ModelSpec = spec_factory(
        ("affine", [0.0, -1.0]),
        ("constant", [1.0]),
        ("shifted-identity", [0.5]),
        xi=1.0,
    )
    return spec


def test_mr_ode_reflected_decay(reflected_decay: ModelSpec) -> None:
    """Test the decay is stopped at the constraint level 0.5 from t = ln 2 on."""
    grid = TimeGrid(1.0, 1000)
    limit = solve_mr_ode(reflected_decay, grid)
    t = grid.nodes

    assert np.max(np.abs(limit.x - np.maximum(np.exp(-t), 0.5))) <= grid.dt
    assert np.max(np.abs(limit.k - 0.5 * np.maximum(t - np.log(2.0), 0.0))) <= grid.dt
    assert limit.constraint_floor(reflected_decay.h) >= -1e-12
    assert limit.flatness_residual(reflected_decay.h) <= 1e-12


def test_mr_ode_first_order(reflected_decay: ModelSpec) -> None:
    """Test halving dt halves the error in K0_T."""
    exact = 0.5 * (1.0 - np.log(2.0))
    errors = [abs(solve_mr_ode(reflected_decay, TimeGrid(1.0, n)).k[-1] - exact) for n in (1000, 2000)]

    assert 1.5 <= errors[0] / errors[1] <= 2.5
