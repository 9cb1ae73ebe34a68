"""Explicit Euler solvers for the deterministic equations.

Notes:
-----
For a Dirac law at u, G0 has the closed form max(0, r - u) where r is the
root of h, so the mean-reflected ODE needs no bisection.
"""

from collections.abc import Callable

import numpy as np
import numpy.typing as npt

from mrsde.common.exceptions import GridMismatchError, NonFiniteStateError
from mrsde.common.grid import TimeGrid
from mrsde.common.logger import get_logger
from mrsde.model.spec import ModelSpec
from mrsde.skeleton.paths import ControlPath, DeterministicPath

logger = get_logger(__name__)


def _check_control(grid: TimeGrid, phi: ControlPath) -> None:
    same_horizon = np.isclose(phi.grid.horizon, grid.horizon)
    if phi.grid.n_steps != grid.n_steps or not same_horizon:
        msg = f"Control grid {phi.grid} does not match {grid}"
        raise GridMismatchError(msg)


def _reflected_euler(
    spec: ModelSpec,
    grid: TimeGrid,
    drift: Callable[[float], float],
) -> DeterministicPath:
    dt, root = grid.dt, spec.h.root
    u = np.empty(grid.n_steps + 1)
    k = np.zeros(grid.n_steps + 1)
    u[0] = spec.xi

    for j in range(grid.n_steps):
        u[j + 1] = u[j] + drift(u[j] + k[j]) * dt
        if not np.isfinite(u[j + 1]):
            raise NonFiniteStateError(j + 1, "mean-reflected ODE")
        k[j + 1] = max(k[j], max(0.0, root - u[j + 1]))

    return DeterministicPath(grid, u + k, k)


def solve_mr_ode(spec: ModelSpec, grid: TimeGrid) -> DeterministicPath:
    """Mean-reflected ODE: X0 = xi + int b(X0) + K0 with h(X0) >= 0 and flat K0.

    Args:
    ----
        spec: model
        grid: time grid on [0, T]

    Returns:
    -------
        deterministic limit (X0, K0)

    """
    return _reflected_euler(spec, grid, lambda x: float(spec.b(x)))


def solve_short_mr_ode(spec: ModelSpec, grid: TimeGrid) -> DeterministicPath:
    """Short-time mean-reflected ODE X0 = xi + K0 on [0, 1]; (xi, 0) when h(xi) >= 0."""
    return _reflected_euler(spec, grid, lambda _: 0.0)


def _controlled_euler(
    spec: ModelSpec,
    grid: TimeGrid,
    phi: ControlPath,
    k0: npt.NDArray[np.float64],
    drift: Callable[[float], float],
    where: str,
) -> DeterministicPath:
    dt = grid.dt
    y = np.empty(grid.n_steps + 1)
    y[0] = spec.xi
    dk = np.diff(k0)

    for j in range(grid.n_steps):
        velocity = drift(y[j]) + float(spec.sigma(y[j])) * phi.phi[j]
        y[j + 1] = y[j] + velocity * dt + dk[j]
        if not np.isfinite(y[j + 1]):
            raise NonFiniteStateError(j + 1, where)

    return DeterministicPath(grid, y, k0)


def solve_skeleton(
    spec: ModelSpec,
    grid: TimeGrid,
    phi: ControlPath,
    k0: npt.ArrayLike,
) -> DeterministicPath:
    """Skeleton equation Y = xi + int b(Y) + int sigma(Y) phi + K0 with K0 fixed.

    Args:
    ----
        spec: model
        grid: time grid on [0, T]
        phi: control
        k0: reflection path of the mean-reflected ODE (echoed in the result)

    Returns:
    -------
        controlled path

    """
    _check_control(grid, phi)
    k = grid.check_path(k0, "k0")
    return _controlled_euler(spec, grid, phi, k, lambda y: float(spec.b(y)), "skeleton")


def solve_short_skeleton(
    spec: ModelSpec,
    grid: TimeGrid,
    phi: ControlPath,
) -> DeterministicPath:
    """Short-time skeleton Y = xi + int sigma(Y) phi on [0, 1] without drift or K."""
    if not np.isclose(grid.horizon, 1.0):
        msg = f"Short-time skeleton lives on [0, 1], got horizon {grid.horizon}"
        raise ValueError(msg)
    _check_control(grid, phi)

    return _controlled_euler(
        spec,
        grid,
        phi,
        np.zeros(grid.n_steps + 1),
        lambda _: 0.0,
        "short-time skeleton",
    )
