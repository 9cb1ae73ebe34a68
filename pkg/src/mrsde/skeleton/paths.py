"""Deterministic paths and piecewise-constant controls on a time grid."""

import dataclasses

import numpy as np
import numpy.typing as npt

from mrsde.common.grid import TimeGrid
from mrsde.model.base import ConstraintFn

ENERGY_SLACK = 1e-12


@dataclasses.dataclass(frozen=True, eq=False)
class DeterministicPath:
    """Path x on the grid nodes with its reflection path k (zeros when unreflected).

    Args:
    ----
        grid: time grid
        x: state at each node
        k: nondecreasing reflection path with k[0] = 0

    """

    grid: TimeGrid
    x: npt.NDArray[np.float64]
    k: npt.NDArray[np.float64]

    def __post_init__(self) -> None:
        x = self.grid.check_path(self.x, "x").copy()
        k = self.grid.check_path(self.k, "k").copy()
        for array in (x, k):
            array.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "k", k)

    @classmethod
    def unreflected(cls, grid: TimeGrid, x: npt.ArrayLike) -> "DeterministicPath":
        return cls(grid, np.asarray(x, dtype=np.float64), np.zeros(grid.n_steps + 1))

    @property
    def u(self) -> npt.NDArray[np.float64]:
        """Unreflected part x - k."""
        return self.x - self.k

    def constraint_floor(self, h: ConstraintFn) -> float:
        """min_j h(x_j)."""
        return float(np.min(h(self.x)))

    def flatness_residual(self, h: ConstraintFn) -> float:
        """sum_j max(0, h(x_{j+1})) (k_{j+1} - k_j)."""
        return float(np.sum(np.maximum(0.0, h(self.x[1:])) * np.diff(self.k)))


@dataclasses.dataclass(frozen=True, eq=False)
class ControlPath:
    """Control phi, constant on each cell [t_j, t_{j+1}).

    Args:
    ----
        grid: time grid
        phi: one value per cell
        bound: optional declared energy bound N (the ball S_N)

    """

    grid: TimeGrid
    phi: npt.NDArray[np.float64]
    bound: float | None = None

    def __post_init__(self) -> None:
        phi = np.array(self.phi, dtype=np.float64)
        if phi.shape != (self.grid.n_steps,):
            msg = f"Control has shape {phi.shape}, grid expects ({self.grid.n_steps},)"
            raise ValueError(msg)
        if not np.all(np.isfinite(phi)):
            msg = "Control values must be finite"
            raise ValueError(msg)
        phi.setflags(write=False)
        object.__setattr__(self, "phi", phi)

        if self.bound is not None and self.energy > self.bound * (1.0 + ENERGY_SLACK):
            msg = f"Control energy {self.energy} exceeds declared bound {self.bound}"
            raise ValueError(msg)

    @classmethod
    def constant(cls, grid: TimeGrid, value: float) -> "ControlPath":
        return cls(grid, np.full(grid.n_steps, float(value)))

    @classmethod
    def zero(cls, grid: TimeGrid) -> "ControlPath":
        return cls.constant(grid, 0.0)

    @property
    def energy(self) -> float:
        """1/2 int |phi|^2 dt."""
        return 0.5 * float(np.sum(self.phi**2)) * self.grid.dt

    def scaled(self, factor: float) -> "ControlPath":
        return ControlPath(self.grid, factor * self.phi)
