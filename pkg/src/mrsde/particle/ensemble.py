"""Simulated particle ensembles and their flat-solution diagnostics."""

import dataclasses
from typing import Any

import numpy as np
import numpy.typing as npt

from mrsde.common.constants import TOL_G0
from mrsde.common.grid import TimeGrid

FloatArray = npt.NDArray[np.float64]


@dataclasses.dataclass(frozen=True, eq=False)
class EnsemblePath:
    """Particle paths of U on a grid together with the deterministic path K.

    Notes:
    -----
    X = U + K column by column. The full matrix `u` is only stored when the
    simulation keeps paths; the terminal column and the per-column
    diagnostics are always available.

    Args:
    ----
        grid: time grid
        n_particles: ensemble size
        k_path: reflection path, one value per node
        u_final: terminal column of U
        h_mean_x: H(K_k, law of U_k), i.e. the empirical E[h(X_{t_k})]
        x_mean: empirical mean of X per node
        seed: run seed
        epsilon: noise scale
        variant: simulated variant
        u: paths of U for the kept particles, shape (n_kept, n_steps + 1)
        sup_deviation: per particle sup_k |X_k - X0_k| against a reference path
        sup_abs: per particle sup_k |X_k|, tracked alongside sup_deviation
        reference_w1: per node W1(law of U_k, Dirac at U0_k) against a reference path
        tol: root tolerance used for G0

    """

    grid: TimeGrid
    n_particles: int
    k_path: npt.NDArray[np.float64]
    u_final: npt.NDArray[np.float64]
    h_mean_x: npt.NDArray[np.float64]
    x_mean: npt.NDArray[np.float64]
    seed: int
    epsilon: float
    variant: str
    u: npt.NDArray[np.float64] | None = None
    sup_deviation: npt.NDArray[np.float64] | None = None
    sup_abs: npt.NDArray[np.float64] | None = None
    reference_w1: npt.NDArray[np.float64] | None = None
    tol: float = TOL_G0

    @property
    def x(self) -> npt.NDArray[np.float64]:
        if self.u is None:
            msg = "Paths were not kept; rerun with keep_paths=True"
            raise ValueError(msg)

        return self.u + self.k_path[np.newaxis, :]

    @property
    def x_final(self) -> npt.NDArray[np.float64]:
        return self.u_final + self.k_path[-1]

    def reference_tracking(self) -> tuple[FloatArray, FloatArray, FloatArray]:
        """(sup_deviation, sup_abs, reference_w1) recorded against a reference path."""
        if (
            self.sup_deviation is None
            or self.sup_abs is None
            or self.reference_w1 is None
        ):
            msg = "Ensemble was not simulated against a reference path"
            raise ValueError(msg)

        return self.sup_deviation, self.sup_abs, self.reference_w1

    def constraint_floor(self) -> float:
        """min_k of the empirical E[h(X_{t_k})]."""
        return float(np.min(self.h_mean_x))

    def flatness_residual(self) -> float:
        """sum_k max(0, E[h(X_{t_{k+1}})]) (K_{k+1} - K_k)."""
        return float(np.sum(np.maximum(0.0, self.h_mean_x[1:]) * np.diff(self.k_path)))

    def k_monotone(self) -> bool:
        return bool(self.k_path[0] == 0.0 and np.all(np.diff(self.k_path) >= 0.0))

    def summary(self) -> dict[str, Any]:
        """Invariant checks and terminal statistics."""
        return {
            "variant": str(self.variant),
            "epsilon": self.epsilon,
            "seed": self.seed,
            "n_particles": self.n_particles,
            "n_steps": self.grid.n_steps,
            "horizon": self.grid.horizon,
            "k_terminal": float(self.k_path[-1]),
            "x_mean_terminal": float(self.x_mean[-1]),
            "constraint_floor": self.constraint_floor(),
            "flatness_residual": self.flatness_residual(),
            "k_monotone": self.k_monotone(),
        }
