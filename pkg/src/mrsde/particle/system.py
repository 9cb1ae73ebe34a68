"""Interacting particle Euler scheme for mean-reflected SDEs.

Notes:
-----
U^i_{k+1} = U^i_k + b(X^i_k) dt + sqrt(eps) sigma(X^i_k) dB^i_k with
X^i_k = U^i_k + K_k, and K_{k+1} = max(K_k, G0(empirical law of U_{k+1})).
K is the running supremum of G0 over the empirical laws, so it is one
deterministic path shared by every particle.
"""

import abc
import concurrent.futures
from typing import Any

import numpy as np
import numpy.typing as npt

from mrsde.common.constants import CHUNK_SIZE, TOL_G0, Variants
from mrsde.common.exceptions import NonFiniteStateError
from mrsde.common.grid import TimeGrid
from mrsde.common.logger import get_logger
from mrsde.common.noise import NoiseStream
from mrsde.measure.empirical import EmpiricalMeasure, g0, h_mean, w1
from mrsde.model.spec import ModelSpec
from mrsde.particle.ensemble import EnsemblePath
from mrsde.skeleton.paths import ControlPath, DeterministicPath

logger = get_logger(__name__)


class SystemMetaclass(abc.ABCMeta):
    """Metaclass for particle systems.

    Notes:
    ------
    Adds the controlled or short-time mixin when the `variant` keyword asks
    for it; the mixins override the drift and the reflection step of the
    small-noise system.
    """

    def __call__(cls, *args: Any, **kwargs: Any) -> Any:
        variant = kwargs.get("variant", Variants.SMALL_NOISE)

        if variant == Variants.CONTROLLED:
            cls = type(f"Controlled{cls.__name__}", (ControlledMixin, cls), {})  # type: ignore[assignment]
            logger.info("Using %s", ControlledMixin.__name__)
        elif variant == Variants.SHORT_TIME:
            cls = type(f"ShortTime{cls.__name__}", (ShortTimeMixin, cls), {})  # type: ignore[assignment]
            logger.info("Using %s", ShortTimeMixin.__name__)
        elif variant != Variants.SMALL_NOISE:
            msg = f"Variant {variant} not supported"
            raise ValueError(msg)

        return super(SystemMetaclass, cls).__call__(*args, **kwargs)


class _ReferenceTracker:
    """Per-particle sup deviations and per-column W1 against a deterministic path."""

    def __init__(
        self,
        grid: TimeGrid,
        reference: DeterministicPath,
        u: npt.NDArray[np.float64],
        measure: EmpiricalMeasure,
    ) -> None:
        self._x = grid.check_path(reference.x, "reference x")
        self._u = self._x - grid.check_path(reference.k, "reference k")
        self.sup_deviation = np.abs(u - self._x[0])
        self.sup_abs = np.abs(u)
        self.w1 = np.empty(grid.n_steps + 1)
        self.w1[0] = w1(measure, EmpiricalMeasure.dirac(self._u[0], measure.n))

    def update(
        self,
        node: int,
        u: npt.NDArray[np.float64],
        measure: EmpiricalMeasure,
        k: float,
    ) -> None:
        x = u + k
        deviation = np.abs(x - self._x[node])
        np.maximum(self.sup_deviation, deviation, out=self.sup_deviation)
        np.maximum(self.sup_abs, np.abs(x), out=self.sup_abs)
        self.w1[node] = w1(measure, EmpiricalMeasure.dirac(self._u[node], measure.n))


class ParticleSystem(metaclass=SystemMetaclass):
    """Small-noise particle system; epsilon = 1 is the unscaled equation.

    Args:
    ----
        spec: model
        grid: time grid
        epsilon: noise scale (>= 0)
        variant: one of `small-noise`, `controlled`, `short-time`
        workers: number of threads for the per-step particle update
        tol: root tolerance for G0

    """

    def __init__(
        self,
        spec: ModelSpec,
        grid: TimeGrid,
        epsilon: float,
        *,
        variant: str = Variants.SMALL_NOISE,
        workers: int = 1,
        tol: float = TOL_G0,
    ) -> None:
        if not np.isfinite(epsilon) or epsilon < 0.0:
            msg = f"Epsilon must be finite and nonnegative, got {epsilon}"
            raise ValueError(msg)
        if workers < 1:
            msg = f"Need at least one worker, got {workers}"
            raise ValueError(msg)

        self.spec = spec
        self.grid = grid
        self.epsilon = float(epsilon)
        self.variant = variant
        self._sqrt_eps = float(np.sqrt(epsilon))
        self._workers = workers
        self._tol = tol

    def drift(self, x: npt.NDArray[np.float64], step: int) -> npt.NDArray[np.float64]:
        """Drift evaluated at X."""
        drift: npt.NDArray[np.float64] = self.spec.b(x)
        return drift

    def diffusion(self, x: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        """Diffusion evaluated at X, including the noise scale."""
        diffusion: npt.NDArray[np.float64] = self._sqrt_eps * self.spec.sigma(x)
        return diffusion

    def reflect(self, measure: EmpiricalMeasure, k_prev: float, step: int) -> float:
        """K at step + 1 from the law of U at step + 1."""
        return max(k_prev, g0(self.spec.h, measure, self._tol))

    def _advance(
        self,
        u: npt.NDArray[np.float64],
        k: float,
        increments: npt.NDArray[np.float64],
        step: int,
        executor: concurrent.futures.Executor | None,
    ) -> npt.NDArray[np.float64]:
        dt = self.grid.dt
        u_next = np.empty_like(u)

        # Chunk boundaries are fixed so results do not depend on the worker count
        def work(start: int) -> None:
            chunk = slice(start, start + CHUNK_SIZE)
            x = u[chunk] + k
            noise = self.diffusion(x) * increments[chunk]
            u_next[chunk] = u[chunk] + self.drift(x, step) * dt + noise

        starts = range(0, u.size, CHUNK_SIZE)
        if executor is None:
            for start in starts:
                work(start)
        else:
            list(executor.map(work, starts))

        return u_next

    def run(
        self,
        n_particles: int,
        seed: int,
        *,
        stream: int = 0,
        keep_paths: bool = True,
        path_limit: int | None = None,
        reference: DeterministicPath | None = None,
    ) -> EnsemblePath:
        """Simulate the ensemble.

        Args:
        ----
            n_particles: ensemble size
            seed: run seed
            stream: noise substream
            keep_paths: store the matrix of U paths
            path_limit: store paths of the first path_limit particles only
            reference: deterministic path for sup-deviation and W1 tracking

        Returns:
        -------
            simulated ensemble

        """
        if n_particles < 1:
            msg = f"Need at least one particle, got {n_particles}"
            raise ValueError(msg)

        grid, spec = self.grid, self.spec
        n_steps = grid.n_steps
        noise = NoiseStream(seed, stream)

        u = np.full(n_particles, spec.xi, dtype=np.float64)
        k_path = np.zeros(n_steps + 1)
        h_mean_x = np.empty(n_steps + 1)
        x_mean = np.empty(n_steps + 1)
        n_kept = n_particles if path_limit is None else min(n_particles, path_limit)
        paths = np.empty((n_kept, n_steps + 1)) if keep_paths and n_kept > 0 else None

        measure = EmpiricalMeasure.from_samples(u)
        h_mean_x[0] = h_mean(spec.h, 0.0, measure)
        x_mean[0] = measure.mean()
        if paths is not None:
            paths[:, 0] = u[:n_kept]

        tracker = None
        if reference is not None:
            tracker = _ReferenceTracker(grid, reference, u, measure)

        logger.info(
            "Simulating %s: %s particles, %s steps, epsilon %s, seed %s",
            type(self).__name__,
            n_particles,
            n_steps,
            self.epsilon,
            seed,
        )

        executor = (
            concurrent.futures.ThreadPoolExecutor(max_workers=self._workers)
            if self._workers > 1
            else None
        )
        try:
            for step in range(n_steps):
                increments = noise.increments(step, n_particles, grid.dt)
                u = self._advance(u, k_path[step], increments, step, executor)
                if not np.all(np.isfinite(u)):
                    raise NonFiniteStateError(step + 1, type(self).__name__)

                measure = EmpiricalMeasure.from_samples(u)
                k_path[step + 1] = self.reflect(measure, float(k_path[step]), step)
                h_mean_x[step + 1] = h_mean(spec.h, float(k_path[step + 1]), measure)
                x_mean[step + 1] = measure.mean() + k_path[step + 1]

                if paths is not None:
                    paths[:, step + 1] = u[:n_kept]
                if tracker is not None:
                    tracker.update(step + 1, u, measure, float(k_path[step + 1]))
        finally:
            if executor is not None:
                executor.shutdown()

        return EnsemblePath(
            grid=grid,
            n_particles=n_particles,
            k_path=k_path,
            u_final=u,
            h_mean_x=h_mean_x,
            x_mean=x_mean,
            seed=seed,
            epsilon=self.epsilon,
            variant=self.variant,
            u=paths,
            sup_deviation=None if tracker is None else tracker.sup_deviation,
            sup_abs=None if tracker is None else tracker.sup_abs,
            reference_w1=None if tracker is None else tracker.w1,
            tol=self._tol,
        )


class ControlledMixin:
    """Extra drift sigma(X) phi with K frozen to a given deterministic path.

    Notes:
    -----
    K is an input here: perturbing the noise by a control does not change
    a law functional computed from the uncontrolled system, so no G0
    evaluations happen in this variant.

    Args:
    ----
        phi: control path on the same grid
        k_frozen: nondecreasing path with k_frozen[0] = 0
    """

    spec: ModelSpec
    grid: TimeGrid

    def __init__(
        self,
        *args: Any,
        phi: ControlPath,
        k_frozen: npt.ArrayLike,
        **kwargs: Any,
    ) -> None:
        super().__init__(*args, **kwargs)  # type: ignore[call-arg]
        k = self.grid.check_path(k_frozen, "k_frozen")
        if k[0] != 0.0 or np.any(np.diff(k) < 0.0):
            msg = "k_frozen must be nondecreasing with k_frozen[0] = 0"
            raise ValueError(msg)
        if phi.grid.n_steps != self.grid.n_steps:
            msg = f"Control has {phi.grid.n_steps} cells, grid has {self.grid.n_steps}"
            raise ValueError(msg)
        self._phi = phi.phi
        self._k_frozen = k

    def drift(self, x: npt.NDArray[np.float64], step: int) -> npt.NDArray[np.float64]:
        drift: npt.NDArray[np.float64] = super().drift(x, step)  # type: ignore[misc]
        return drift + self.spec.sigma(x) * self._phi[step]

    def reflect(self, measure: EmpiricalMeasure, k_prev: float, step: int) -> float:
        return float(self._k_frozen[step + 1])


class ShortTimeMixin:
    """Rescaled system on [0, 1]: drift eps b, diffusion sqrt(eps) sigma.

    Notes:
    -----
    Its law matches that of {X_{eps t}} for the unscaled equation.
    """

    epsilon: float
    grid: TimeGrid

    def __init__(self, *args: Any, **kwargs: Any) -> None:
        super().__init__(*args, **kwargs)  # type: ignore[call-arg]
        if not np.isclose(self.grid.horizon, 1.0):
            msg = f"Short-time system lives on [0, 1], got horizon {self.grid.horizon}"
            raise ValueError(msg)

    def drift(self, x: npt.NDArray[np.float64], step: int) -> npt.NDArray[np.float64]:
        drift: npt.NDArray[np.float64] = super().drift(x, step)  # type: ignore[misc]
        return self.epsilon * drift


def simulate(
    spec: ModelSpec,
    grid: TimeGrid,
    n_particles: int,
    epsilon: float,
    seed: int,
    **kwargs: Any,
) -> EnsemblePath:
    """Small-noise system; `workers` and `tol` go to the system, the rest to `run`."""
    workers, tol = kwargs.pop("workers", 1), kwargs.pop("tol", TOL_G0)
    system = ParticleSystem(spec, grid, epsilon, workers=workers, tol=tol)
    return system.run(n_particles, seed, **kwargs)


def simulate_controlled(
    spec: ModelSpec,
    grid: TimeGrid,
    n_particles: int,
    epsilon: float,
    seed: int,
    phi: ControlPath,
    k_frozen: npt.ArrayLike,
    **kwargs: Any,
) -> EnsemblePath:
    """Controlled system with frozen K."""
    workers, tol = kwargs.pop("workers", 1), kwargs.pop("tol", TOL_G0)
    system = ParticleSystem(
        spec,
        grid,
        epsilon,
        variant=Variants.CONTROLLED,
        workers=workers,
        tol=tol,
        phi=phi,
        k_frozen=k_frozen,
    )
    return system.run(n_particles, seed, **kwargs)


def simulate_short_time(
    spec: ModelSpec,
    grid: TimeGrid,
    n_particles: int,
    epsilon: float,
    seed: int,
    **kwargs: Any,
) -> EnsemblePath:
    """Short-time rescaled system on [0, 1]."""
    workers, tol = kwargs.pop("workers", 1), kwargs.pop("tol", TOL_G0)
    system = ParticleSystem(
        spec,
        grid,
        epsilon,
        variant=Variants.SHORT_TIME,
        workers=workers,
        tol=tol,
    )
    return system.run(n_particles, seed, **kwargs)
