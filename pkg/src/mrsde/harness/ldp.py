"""Monte Carlo check of the large-deviation asymptotics -eps log P(event)."""

import dataclasses
import enum
from collections.abc import Sequence
from typing import Any

import numpy as np
import numpy.typing as npt

from mrsde.common.constants import EventKinds, EventStatistics, RateModes, Variants
from mrsde.common.exceptions import ConvergenceError
from mrsde.common.grid import TimeGrid
from mrsde.common.logger import get_logger
from mrsde.harness.statistics import MIN_BATCHES, batch_means
from mrsde.model.spec import ModelSpec
from mrsde.particle.ensemble import EnsemblePath
from mrsde.particle.system import simulate, simulate_short_time
from mrsde.rate.endpoint import endpoint_rate
from mrsde.rate.path import path_rate, short_path_rate
from mrsde.skeleton.paths import DeterministicPath
from mrsde.skeleton.solvers import solve_mr_ode, solve_short_mr_ode

logger = get_logger(__name__)

PILOT_HITS = 10
EXIT_FRACTIONS = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)


@enum.unique
class ReferenceLabels(str, enum.Enum):
    """Provenance of the reference rate in an LDP report."""

    ENDPOINT = "endpoint-rate"
    UPPER_BOUND = "upper-bound"
    UNAVAILABLE = "unavailable"

    def __str__(self) -> str:
        """Get string representation."""
        return self.value


@dataclasses.dataclass(frozen=True)
class Event:
    """Rare event on a particle path or on the empirical mean path of an ensemble.

    Args:
    ----
        kind: `endpoint-above`, `endpoint-below` or `sup-deviation`
        threshold: level a, or tube radius delta > 0 for sup-deviation

    """

    kind: str
    threshold: float

    def __post_init__(self) -> None:
        if self.kind not in set(EventKinds):
            kinds = [str(k) for k in EventKinds]
            msg = f"Event kind {self.kind} not supported; choose from {kinds}"
            raise ValueError(msg)
        if not np.isfinite(self.threshold):
            msg = f"Event threshold must be finite, got {self.threshold}"
            raise ValueError(msg)
        if self.kind == EventKinds.SUP_DEVIATION and self.threshold <= 0.0:
            msg = f"Tube radius must be positive, got {self.threshold}"
            raise ValueError(msg)

    @property
    def needs_reference(self) -> bool:
        return self.kind == EventKinds.SUP_DEVIATION

    def __str__(self) -> str:
        return f"{self.kind}({self.threshold})"

    def holds_at(self, value: float) -> bool:
        """Whether an endpoint value lies in the event."""
        if self.kind == EventKinds.ENDPOINT_ABOVE:
            return value >= self.threshold
        if self.kind == EventKinds.ENDPOINT_BELOW:
            return value <= self.threshold

        msg = f"Event {self} is not an endpoint event"
        raise ValueError(msg)

    def hits(self, ensemble: EnsemblePath) -> npt.NDArray[np.bool_]:
        """Per-particle indicator of the event."""
        if self.kind == EventKinds.SUP_DEVIATION:
            if ensemble.sup_deviation is None:
                msg = "Sup-deviation events need a reference-tracked ensemble"
                raise ValueError(msg)
            return ensemble.sup_deviation >= self.threshold

        x_final = ensemble.x_final
        if self.kind == EventKinds.ENDPOINT_ABOVE:
            return x_final >= self.threshold
        return x_final <= self.threshold

    def ensemble_hit(self, ensemble: EnsemblePath, limit: DeterministicPath) -> bool:
        """Whether the empirical mean path of the ensemble lies in the event."""
        if self.kind == EventKinds.SUP_DEVIATION:
            return bool(np.max(np.abs(ensemble.x_mean - limit.x)) >= self.threshold)
        return self.holds_at(float(ensemble.x_mean[-1]))


@dataclasses.dataclass(frozen=True)
class ExperimentPlan:
    """Epsilon schedule, event and Monte Carlo sizes of one LDP experiment.

    Args:
    ----
        model: model
        variant: `small-noise` or `short-time`
        epsilons: strictly decreasing, all in (0, 1]
        event: event to estimate
        n_particles: ensemble size per batch
        n_steps: Euler steps on [0, T] (or [0, 1] for short-time)
        n_mc_batches: independent ensembles per epsilon
        seed: run seed
        statistic: `per-particle`, or `per-ensemble` to count ensembles whose
            empirical mean path lies in the event
        workers: threads per particle step (results do not depend on it)

    """

    model: ModelSpec
    variant: str
    epsilons: tuple[float, ...]
    event: Event
    n_particles: int
    n_steps: int
    n_mc_batches: int
    seed: int
    statistic: str = EventStatistics.PER_PARTICLE
    workers: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "epsilons", tuple(float(e) for e in self.epsilons))
        if self.variant not in (Variants.SMALL_NOISE, Variants.SHORT_TIME):
            msg = f"LDP experiments need small-noise or short-time, got {self.variant}"
            raise ValueError(msg)
        eps = np.asarray(self.epsilons)
        if eps.size == 0 or np.any(eps <= 0.0) or np.any(eps > 1.0):
            msg = f"Epsilons must be non-empty and lie in (0, 1], got {self.epsilons}"
            raise ValueError(msg)
        if np.any(np.diff(eps) >= 0.0):
            msg = f"Epsilons must be strictly decreasing, got {self.epsilons}"
            raise ValueError(msg)
        if self.n_particles < 1 or self.n_steps < 1:
            msg = (
                f"Need n_particles >= 1 and n_steps >= 1, "
                f"got {self.n_particles}, {self.n_steps}"
            )
            raise ValueError(msg)
        if self.statistic not in set(EventStatistics):
            msg = f"Statistic {self.statistic} not supported"
            raise ValueError(msg)
        if self.n_mc_batches < MIN_BATCHES:
            msg = f"Need at least {MIN_BATCHES} batches, got {self.n_mc_batches}"
            raise ValueError(msg)

    @property
    def grid(self) -> TimeGrid:
        horizon = self.model.horizon if self.variant == Variants.SMALL_NOISE else 1.0
        return TimeGrid(horizon, self.n_steps)

    @property
    def units_per_run(self) -> int:
        """Samples contributed by one simulated ensemble."""
        if self.statistic == EventStatistics.PER_ENSEMBLE:
            return 1
        return self.n_particles

    @property
    def n_samples(self) -> int:
        return self.units_per_run * self.n_mc_batches


@dataclasses.dataclass(frozen=True)
class LdpRow:
    epsilon: float
    p_hat: float
    std_err: float
    neg_eps_log_p: float
    neg_eps_log_p_se: float
    hits: int

    @property
    def zero_hits(self) -> bool:
        return self.hits == 0


@dataclasses.dataclass(frozen=True)
class LdpReport:
    """Per-epsilon estimates with the reference rate.

    Args:
    ----
        rows: one row per epsilon, in schedule order
        reference_rate: rate of the event from `mrsde.rate`
        reference_label: `endpoint-rate`, `upper-bound` or `unavailable`
        statistic: sample unit of the event, `per-particle` or `per-ensemble`
        pilot_probability: event frequency in the pilot run at the largest epsilon
        pilot_ok: pilot frequency reached the observability floor

    """

    rows: tuple[LdpRow, ...]
    reference_rate: float
    reference_label: str
    statistic: str
    pilot_probability: float
    pilot_ok: bool

    def trend_nonincreasing(self, n_se: float = 2.0) -> bool:
        """-eps log p_hat does not grow as eps falls, within n_se pooled std errors."""
        values = [row for row in self.rows if not row.zero_hits]
        return all(
            later.neg_eps_log_p - earlier.neg_eps_log_p
            <= n_se * np.hypot(earlier.neg_eps_log_p_se, later.neg_eps_log_p_se)
            for earlier, later in zip(values[:-1], values[1:], strict=True)
        )

    def table(self) -> list[tuple[Any, ...]]:
        """Rows for `epsilon,p_hat,std_err,neg_eps_log_p,reference_rate`."""
        return [
            (
                row.epsilon,
                row.p_hat,
                row.std_err,
                row.neg_eps_log_p,
                self.reference_rate,
            )
            for row in self.rows
        ]


def _deterministic_limit(plan: ExperimentPlan, grid: TimeGrid) -> DeterministicPath:
    if plan.variant == Variants.SMALL_NOISE:
        return solve_mr_ode(plan.model, grid)
    return solve_short_mr_ode(plan.model, grid)


def _count_hits(
    plan: ExperimentPlan,
    grid: TimeGrid,
    epsilon: float,
    stream: int,
    limit: DeterministicPath,
) -> int:
    per_ensemble = plan.statistic == EventStatistics.PER_ENSEMBLE
    # Only per-particle sup-deviation events need the tracked deviations
    track = plan.event.needs_reference and not per_ensemble
    run = simulate if plan.variant == Variants.SMALL_NOISE else simulate_short_time
    ensemble = run(
        plan.model,
        grid,
        plan.n_particles,
        epsilon,
        plan.seed,
        stream=stream,
        keep_paths=False,
        reference=limit if track else None,
        workers=plan.workers,
    )
    if per_ensemble:
        return int(plan.event.ensemble_hit(ensemble, limit))
    return int(np.count_nonzero(plan.event.hits(ensemble)))


def sup_deviation_bound(
    spec: ModelSpec,
    limit: DeterministicPath,
    delta: float,
    mode: str,
    exit_fractions: Sequence[float] = EXIT_FRACTIONS,
) -> float:
    """Upper bound on the rate of {sup_t |X_t - X0_t| >= delta} from candidate paths.

    Notes:
    -----
    Candidates are X0 +/- delta min(t / tau, 1). Once the tube boundary is
    reached at tau the event has happened, so only the control energy on
    [0, tau] is charged.

    Args:
    ----
        spec: nondegenerate model
        limit: deterministic limit X0 with its reflection path
        delta: tube radius
        mode: `small-noise` or `short-time`
        exit_fractions: exit times as fractions of the horizon

    Returns:
    -------
        smallest candidate energy

    """
    grid = limit.grid
    best = np.inf

    for fraction in exit_fractions:
        n_exit = max(1, round(fraction * grid.n_steps))
        ramp = delta * np.minimum(grid.nodes / grid.nodes[n_exit], 1.0)
        for sign in (1.0, -1.0):
            candidate = DeterministicPath(grid, limit.x + sign * ramp, limit.k)
            if mode == RateModes.SMALL_NOISE:
                result = path_rate(spec, candidate, limit.k)
            else:
                result = short_path_rate(spec, candidate)
            if result.control is None:
                continue
            charged = result.control.phi[:n_exit]
            best = min(best, 0.5 * float(np.sum(charged**2)) * grid.dt)

    return float(best)


def _reference_rate(
    plan: ExperimentPlan,
    grid: TimeGrid,
    limit: DeterministicPath,
) -> tuple[float, ReferenceLabels]:
    spec, event = plan.model, plan.event
    if plan.statistic == EventStatistics.PER_ENSEMBLE:
        logger.info("Reference rate unavailable for the empirical-mean statistic")
        return float("nan"), ReferenceLabels.UNAVAILABLE
    if not spec.nondegenerate:
        logger.warning("Reference rate unavailable: sigma_floor is 0")
        return float("nan"), ReferenceLabels.UNAVAILABLE

    mode = RateModes(str(plan.variant))
    if event.needs_reference:
        bound = sup_deviation_bound(spec, limit, event.threshold, mode)
        return bound, ReferenceLabels.UPPER_BOUND

    if event.holds_at(float(limit.x[-1])):
        return 0.0, ReferenceLabels.ENDPOINT

    try:
        result = endpoint_rate(spec, event.threshold, mode, grid)
    except ConvergenceError as err:
        logger.warning("Endpoint rate did not converge; reporting it as an upper bound")
        return float(err.result.value), ReferenceLabels.UPPER_BOUND

    return result.value, ReferenceLabels.ENDPOINT


def run_ldp_experiment(plan: ExperimentPlan) -> LdpReport:
    """Estimate P(event) across the epsilon schedule and compare with the rate.

    Notes:
    -----
    Noise stream 0 is the pilot run; batch b at schedule index i uses stream
    1 + i * n_mc_batches + b, so the report is a deterministic function of
    the plan. With the per-ensemble statistic each batch contributes one
    sample, the indicator that its empirical mean path lies in the event.
    Zero-hit rows are reported with p_hat = 0 and an infinite
    -eps log p_hat.

    Args:
    ----
        plan: experiment plan

    Returns:
    -------
        report with per-epsilon rows and the reference rate

    """
    grid = plan.grid
    limit = _deterministic_limit(plan, grid)
    logger.info("LDP experiment: event %s, epsilons %s", plan.event, plan.epsilons)

    pilot_hits = _count_hits(plan, grid, plan.epsilons[0], 0, limit)
    pilot_probability = pilot_hits / plan.units_per_run
    floor = PILOT_HITS / plan.n_samples
    pilot_ok = pilot_probability >= floor
    if not pilot_ok:
        logger.warning(
            "Pilot frequency %s at epsilon %s is below the observability floor %s",
            pilot_probability,
            plan.epsilons[0],
            floor,
        )

    rows = []
    for index, epsilon in enumerate(plan.epsilons):
        first_stream = 1 + index * plan.n_mc_batches
        counts = np.array(
            [
                _count_hits(plan, grid, epsilon, first_stream + batch, limit)
                for batch in range(plan.n_mc_batches)
            ],
        )
        p_hat, std_err = batch_means(counts / plan.units_per_run)
        hits = int(np.sum(counts))

        if hits == 0:
            logger.warning("No hits at epsilon %s", epsilon)
            neg_eps_log_p, neg_eps_log_p_se = float("inf"), float("nan")
        else:
            neg_eps_log_p = -epsilon * float(np.log(p_hat))
            neg_eps_log_p_se = epsilon * std_err / p_hat

        rows.append(
            LdpRow(epsilon, p_hat, std_err, neg_eps_log_p, neg_eps_log_p_se, hits),
        )
        logger.info(
            "epsilon %s: p_hat %s +/- %s, hits %s",
            epsilon,
            p_hat,
            std_err,
            hits,
        )

    reference_rate, reference_label = _reference_rate(plan, grid, limit)

    return LdpReport(
        rows=tuple(rows),
        reference_rate=reference_rate,
        reference_label=str(reference_label),
        statistic=str(plan.statistic),
        pilot_probability=pilot_probability,
        pilot_ok=pilot_ok,
    )
