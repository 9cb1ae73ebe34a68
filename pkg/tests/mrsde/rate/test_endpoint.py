"""Test functions for endpoint rates."""

from typing import Any

import pytest

import numpy as np

from mrsde.common.exceptions import ConvergenceError, DegenerateDiffusionError
from mrsde.common.grid import TimeGrid
from mrsde.model import ModelSpec
from mrsde.rate import EndpointProblem, endpoint_rate, path_rate
from mrsde.skeleton import ControlPath, solve_mr_ode, solve_skeleton

FD_STEP = 1e-6


@pytest.fixture
def nonlinear(spec_factory: Any) -> ModelSpec:
    spec: ModelSpec = spec_factory(
        ("sin-affine", [-0.5, 0.3]),
        ("saturated-linear", [1.0, 0.5]),
        ("sin-affine-monotone", [2.0, 1.0]),
        xi=1.0,
    )
    return spec


def _central_difference(f: Any, phi: np.ndarray) -> np.ndarray:
    grad = np.empty_like(phi)
    for j in range(phi.size):
        step = np.zeros_like(phi)
        step[j] = FD_STEP
        grad[j] = (f(phi + step) - f(phi - step)) / (2.0 * FD_STEP)

    return grad


def test_terminal_matches_skeleton(nonlinear: ModelSpec) -> None:
    """Test the TF terminal map agrees with the Euler skeleton."""
    grid = TimeGrid(1.0, 25)
    k0 = solve_mr_ode(nonlinear, grid).k
    phi = np.random.default_rng(1).normal(0.0, 1.0, 25)
    problem = EndpointProblem(nonlinear, grid, k0)
    path = solve_skeleton(nonlinear, grid, ControlPath(grid, phi), k0)

    assert problem.terminal(phi) == pytest.approx(path.x[-1], abs=1e-10)


@pytest.mark.parametrize("with_drift", [True, False])
def test_adjoint_gradient(nonlinear: ModelSpec, with_drift: bool) -> None:
    """Test the adjoint gradient of Y_T against central differences."""
    grid = TimeGrid(1.0, 20)
    problem = EndpointProblem(
        nonlinear, grid, solve_mr_ode(nonlinear, grid).k, with_drift=with_drift
    )
    phi = np.random.default_rng(2).normal(0.5, 1.0, 20)

    _, grad = problem.terminal_and_gradient(phi)
    expected = _central_difference(problem.terminal, phi)

    assert np.linalg.norm(grad - expected) <= 1e-4 * np.linalg.norm(expected)


def test_objective_gradient(nonlinear: ModelSpec) -> None:
    """Test the augmented Lagrangian gradient against central differences."""
    grid = TimeGrid(1.0, 10)
    problem = EndpointProblem(nonlinear, grid, solve_mr_ode(nonlinear, grid).k)
    phi = np.random.default_rng(3).normal(0.0, 1.0, 10)

    grad = problem.gradient(phi, 0.7, multiplier=0.3, penalty=5.0)
    expected = _central_difference(lambda p: problem.objective(p, 0.7, 0.3, 5.0), phi)

    assert np.linalg.norm(grad - expected) <= 1e-4 * np.linalg.norm(expected)


def test_project(schilder: ModelSpec) -> None:
    """Test the radial projection lands on the energy ball."""
    grid = TimeGrid(1.0, 10)
    problem = EndpointProblem(schilder, grid, np.zeros(11), bound=0.5)
    inside = np.full(10, 0.5)
    outside = np.full(10, 3.0)

    assert np.array_equal(problem.project(inside), inside)
    assert problem.energy(problem.project(outside)) == pytest.approx(0.5)


@pytest.mark.parametrize("mode", ["small-noise", "short-time"])
@pytest.mark.parametrize("target", [-0.5, 0.5, 1.0])
def test_schilder_rate(schilder: ModelSpec, mode: str, target: float) -> None:
    """Test I(a) = a^2 / 2T for Brownian motion."""
    grid = TimeGrid(1.0, 100)
    result = endpoint_rate(schilder, target, mode, grid)

    assert result.converged
    assert result.value == pytest.approx(0.5 * target**2, abs=1e-4)
    assert abs(result.terminal_gap) <= 1e-6
    assert np.allclose(result.control.phi, target, atol=1e-3)  # type: ignore[union-attr]


def test_closed_form_rate(closed_form: ModelSpec) -> None:
    """Test the frozen reflection path cancels the drift, leaving a^2 / 2."""
    result = endpoint_rate(closed_form, 0.3, "small-noise", TimeGrid(1.0, 100))

    assert result.value == pytest.approx(0.045, abs=1e-4)


def test_ornstein_uhlenbeck_rate(ornstein_uhlenbeck: ModelSpec) -> None:
    """Test I(a) = a^2 / (1 - exp(-2T)) for b(x) = -x."""
    result = endpoint_rate(ornstein_uhlenbeck, 0.5, "small-noise", TimeGrid(1.0, 200))

    assert result.value == pytest.approx(0.25 / (1.0 - np.exp(-2.0)), rel=1e-2)


def test_inactive_bound(schilder: ModelSpec) -> None:
    """Test a loose energy bound leaves the rate unchanged."""
    result = endpoint_rate(schilder, 0.5, "small-noise", TimeGrid(1.0, 50), bound=1.0)

    assert result.value == pytest.approx(0.125, abs=1e-4)
    assert result.control.bound == 1.0  # type: ignore[union-attr]


def test_infeasible_bound(schilder: ModelSpec) -> None:
    """Test an energy bound below the rate exhausts the budget."""
    with pytest.raises(ConvergenceError) as err:
        _ = endpoint_rate(
            schilder,
            0.5,
            "small-noise",
            TimeGrid(1.0, 20),
            bound=0.05,
            max_outer=3,
            max_inner=20,
        )

    result = err.value.result
    assert not result.converged
    assert result.value <= 0.05 * (1.0 + 1e-9)


def test_degenerate(geometric: ModelSpec) -> None:
    """Test endpoint rates need sigma_floor > 0."""
    with pytest.raises(DegenerateDiffusionError):
        _ = endpoint_rate(geometric, 1.5, "small-noise", TimeGrid(1.0, 10))


@pytest.mark.parametrize(
    "target,mode,horizon",
    [(np.inf, "small-noise", 1.0), (0.5, "diffusion", 1.0), (0.5, "short-time", 2.0)],
)
def test_fail(schilder: ModelSpec, target: float, mode: str, horizon: float) -> None:
    """Test non-finite targets, unknown modes and short-time horizons other than 1."""
    with pytest.raises(ValueError):
        _ = endpoint_rate(schilder, target, mode, TimeGrid(horizon, 10))


def test_bad_bound(schilder: ModelSpec) -> None:
    with pytest.raises(ValueError):
        _ = EndpointProblem(schilder, TimeGrid(1.0, 10), np.zeros(11), bound=0.0)


@pytest.mark.parametrize("fixture", ["schilder", "closed_form", "ornstein_uhlenbeck"])
def test_endpoint_below_path_rates(fixture: str, request: pytest.FixtureRequest) -> None:
    """Test I(a) <= I(g) for skeletons g of random controls with g(T) = a."""
    spec = request.getfixturevalue(fixture)
    grid = TimeGrid(1.0, 20)
    k0 = solve_mr_ode(spec, grid).k
    rng = np.random.default_rng(11)

    for _ in range(3):
        path = solve_skeleton(spec, grid, ControlPath(grid, rng.normal(0.3, 1.0, 20)), k0)
        best = endpoint_rate(spec, float(path.x[-1]), "small-noise", grid)

        assert best.value <= path_rate(spec, path, k0).value + 1e-6
