"""Uniform time grid on [0, T]."""

import dataclasses
import functools

import numpy as np
import numpy.typing as npt

from mrsde.common.exceptions import GridMismatchError


@dataclasses.dataclass(frozen=True)
class TimeGrid:
    """Uniform grid t_k = k * dt, k = 0, ..., n_steps.

    Args:
    ----
        horizon: final time T > 0
        n_steps: number of Euler steps (>= 1)

    """

    horizon: float
    n_steps: int

    def __post_init__(self) -> None:
        if not np.isfinite(self.horizon) or self.horizon <= 0.0:
            msg = f"Horizon must be positive and finite, got {self.horizon}"
            raise ValueError(msg)
        if self.n_steps < 1:
            msg = f"Grid needs at least one step, got {self.n_steps}"
            raise ValueError(msg)

    @property
    def dt(self) -> float:
        return self.horizon / self.n_steps

    @functools.cached_property
    def nodes(self) -> npt.NDArray[np.float64]:
        """Grid nodes; the last node equals the horizon exactly."""
        nodes = np.linspace(0.0, self.horizon, self.n_steps + 1)
        nodes.setflags(write=False)
        return nodes

    def prefix(self, n_steps: int) -> "TimeGrid":
        """Grid covering the first n_steps cells of this one."""
        return TimeGrid(horizon=n_steps * self.dt, n_steps=n_steps)

    def check_path(self, values: npt.ArrayLike, name: str) -> npt.NDArray[np.float64]:
        """Return values as a float array, checking it has one entry per node.

        Args:
        ----
            values: path sampled on the grid
            name: name used in the error message

        """
        path = np.asarray(values, dtype=np.float64)
        if path.shape != (self.n_steps + 1,):
            msg = f"{name} has shape {path.shape}, grid expects ({self.n_steps + 1},)"
            raise GridMismatchError(msg)

        return path
