"""Scheme convergence and epsilon -> 0 studies against closed-form limits."""

import dataclasses
from collections.abc import Sequence
from typing import Any

import numpy as np

from mrsde.common.constants import CoefficientKinds, ConstraintKinds
from mrsde.common.grid import TimeGrid
from mrsde.common.logger import get_logger
from mrsde.harness.statistics import MIN_BATCHES, batch_means, loglog_slope
from mrsde.model.spec import ModelSpec
from mrsde.particle.system import simulate
from mrsde.skeleton.solvers import solve_mr_ode

logger = get_logger(__name__)

EXPECTED_N_SLOPE = -0.5
N_SLOPE_TOLERANCE = 0.15


def is_closed_form(spec: ModelSpec) -> bool:
    """b = -1, sigma = 1, xi = 0, h = identity: K_t = t and X_t = B_t."""
    return (
        spec.b.kind == CoefficientKinds.CONSTANT
        and spec.b.params == (-1.0,)
        and spec.sigma.kind == CoefficientKinds.CONSTANT
        and spec.sigma.params == (1.0,)
        and spec.xi == 0.0
        and spec.h.kind == ConstraintKinds.IDENTITY
    )


@dataclasses.dataclass(frozen=True)
class ConvergenceRow:
    dt: float
    n_particles: int
    k_error: float
    x_error: float


@dataclasses.dataclass(frozen=True)
class ConvergenceStudy:
    """Error table with fitted log-log slopes.

    Args:
    ----
        rows: one row per (dt, n_particles) cell
        n_slope: slope of k_error in n_particles at the finest dt
        dt_slope: slope of k_error in dt at the largest n_particles

    """

    rows: tuple[ConvergenceRow, ...]
    n_slope: float
    dt_slope: float

    def table(self) -> list[tuple[Any, ...]]:
        return [dataclasses.astuple(row) for row in self.rows]


def run_convergence_study(
    spec: ModelSpec,
    dts: Sequence[float],
    n_particles: Sequence[int],
    seed: int,
    *,
    n_replicates: int = 1,
    workers: int = 1,
) -> ConvergenceStudy:
    """Errors of the particle scheme against K_t = t and E[X_T] = 0.

    Notes:
    -----
    k_error is sup_k |K_k - t_k| and x_error is |mean of X_T| over the
    particles, each averaged over independent replicates.

    Args:
    ----
        spec: the closed-form instance
        dts: step sizes; T / dt must be an integer
        n_particles: ensemble sizes
        seed: run seed; replicate r uses noise stream r
        n_replicates: independent ensembles per cell
        workers: threads per particle step

    Returns:
    -------
        error table and slopes

    """
    if not is_closed_form(spec):
        msg = "Convergence study needs b = -1, sigma = 1, xi = 0 and h = identity"
        raise ValueError(msg)
    if n_replicates < 1:
        msg = f"Need at least one replicate, got {n_replicates}"
        raise ValueError(msg)

    rows = []
    for dt in dts:
        n_steps = round(spec.horizon / dt)
        if n_steps < 1 or not np.isclose(n_steps * dt, spec.horizon):
            msg = f"Step {dt} does not divide the horizon {spec.horizon}"
            raise ValueError(msg)
        grid = TimeGrid(spec.horizon, n_steps)

        for n in n_particles:
            k_errors, x_errors = [], []
            for replicate in range(n_replicates):
                ensemble = simulate(
                    spec,
                    grid,
                    n,
                    1.0,
                    seed,
                    stream=replicate,
                    keep_paths=False,
                    workers=workers,
                )
                k_errors.append(float(np.max(np.abs(ensemble.k_path - grid.nodes))))
                x_errors.append(abs(float(ensemble.x_mean[-1])))

            row = ConvergenceRow(
                grid.dt,
                int(n),
                float(np.mean(k_errors)),
                float(np.mean(x_errors)),
            )
            rows.append(row)
            logger.info(
                "dt %s, n %s: k_error %s, x_error %s",
                row.dt,
                row.n_particles,
                row.k_error,
                row.x_error,
            )

    finest = min(row.dt for row in rows)
    largest = max(row.n_particles for row in rows)
    at_finest = [row for row in rows if row.dt == finest]
    at_largest = [row for row in rows if row.n_particles == largest]
    n_slope = loglog_slope(
        [r.n_particles for r in at_finest],
        [r.k_error for r in at_finest],
    )
    dt_slope = loglog_slope([r.dt for r in at_largest], [r.k_error for r in at_largest])

    if np.isfinite(n_slope) and abs(n_slope - EXPECTED_N_SLOPE) > N_SLOPE_TOLERANCE:
        logger.warning(
            "Particle-count slope %s outside %s +/- %s",
            n_slope,
            EXPECTED_N_SLOPE,
            N_SLOPE_TOLERANCE,
        )

    return ConvergenceStudy(tuple(rows), n_slope, dt_slope)


@dataclasses.dataclass(frozen=True)
class EpsLimitRow:
    epsilon: float
    mean_sq_sup_x_dev: float
    std_err: float
    sup_k_dev: float
    w1_bound: float
    sup_x_second_moment: float


@dataclasses.dataclass(frozen=True)
class EpsLimitStudy:
    rows: tuple[EpsLimitRow, ...]

    def decreasing(self) -> bool:
        """mean_sq_sup_x_dev strictly decreases along the schedule."""
        values = [row.mean_sq_sup_x_dev for row in self.rows]
        pairs = zip(values[:-1], values[1:], strict=True)
        return all(later < earlier for earlier, later in pairs)

    def table(self) -> list[tuple[Any, ...]]:
        return [dataclasses.astuple(row) for row in self.rows]


def run_eps_limit_study(
    spec: ModelSpec,
    epsilons: Sequence[float],
    n_particles: int,
    n_steps: int,
    seed: int,
    *,
    n_batches: int = MIN_BATCHES,
    workers: int = 1,
) -> EpsLimitStudy:
    """Deviation of the noisy particle system from the mean-reflected ODE.

    Notes:
    -----
    Every epsilon reuses noise stream 0, so the schedule is compared on
    common random numbers. The standard error of E[sup |X - X0|^2] comes
    from batch means over contiguous particle groups. w1_bound is
    (M / m) sup_k W1(law of U_k, Dirac at U0_k), the reflection map's
    Lipschitz bound on sup_k |K_k - K0_k|.

    Args:
    ----
        spec: model
        epsilons: noise levels in [0, 1]
        n_particles: ensemble size
        n_steps: Euler steps on [0, T]
        seed: run seed
        n_batches: particle groups for the standard error
        workers: threads per particle step

    Returns:
    -------
        one row per epsilon

    """
    eps = np.asarray(epsilons, dtype=np.float64)
    if eps.size == 0 or np.any(eps < 0.0) or np.any(eps > 1.0):
        msg = f"Epsilons must be non-empty and lie in [0, 1], got {list(epsilons)}"
        raise ValueError(msg)
    if n_particles < n_batches:
        msg = f"Need at least {n_batches} particles for the batches, got {n_particles}"
        raise ValueError(msg)

    grid = TimeGrid(spec.horizon, n_steps)
    limit = solve_mr_ode(spec, grid)
    ratio = spec.h.M / spec.h.m

    rows = []
    for epsilon in eps:
        ensemble = simulate(
            spec,
            grid,
            n_particles,
            float(epsilon),
            seed,
            keep_paths=False,
            reference=limit,
            workers=workers,
        )
        sup_deviation, sup_abs, reference_w1 = ensemble.reference_tracking()
        mean_sq, std_err = batch_means(sup_deviation**2, n_batches)
        rows.append(
            EpsLimitRow(
                epsilon=float(epsilon),
                mean_sq_sup_x_dev=mean_sq,
                std_err=std_err,
                sup_k_dev=float(np.max(np.abs(ensemble.k_path - limit.k))),
                w1_bound=ratio * float(np.max(reference_w1)),
                sup_x_second_moment=float(np.mean(sup_abs**2)),
            ),
        )
        logger.info(
            "epsilon %s: E[sup |X - X0|^2] = %s +/- %s",
            epsilon,
            mean_sq,
            std_err,
        )

    return EpsLimitStudy(tuple(rows))
