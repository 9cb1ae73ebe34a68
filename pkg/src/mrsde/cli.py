"""Command-line entry point: one subcommand per experiment, CSV artifacts out."""

import argparse
import sys
from collections.abc import Iterator, Sequence
from pathlib import Path
from typing import Any

import numpy as np
import numpy.typing as npt
from omegaconf import DictConfig, OmegaConf

from mrsde.common.constants import ExitCodes, Variants
from mrsde.common.exceptions import (
    BracketError,
    ConfigError,
    ConvergenceError,
    NonFiniteStateError,
)
from mrsde.common.grid import TimeGrid
from mrsde.common.io import write_csv, write_json
from mrsde.common.logger import LEVELS, get_logger, set_level
from mrsde.config import COMMANDS, config_hash, load_config
from mrsde.harness import (
    Event,
    ExperimentPlan,
    is_closed_form,
    run_convergence_study,
    run_eps_limit_study,
    run_ldp_experiment,
)
from mrsde.malliavin import (
    cameron_martin_check,
    density_estimate,
    kernel_direct,
    kernel_moment,
    kernel_product,
    malliavin_covariance,
    picard_iterates,
    tangent_simulate,
)
from mrsde.model import ModelSpec, validate
from mrsde.particle import simulate, simulate_controlled, simulate_short_time
from mrsde.rate import endpoint_rate, path_rate, short_path_rate
from mrsde.skeleton import (
    ControlPath,
    DeterministicPath,
    solve_mr_ode,
    solve_short_mr_ode,
    solve_short_skeleton,
    solve_skeleton,
)

logger = get_logger(__name__)

NUMERICAL_ERRORS = (NonFiniteStateError, BracketError, ConvergenceError)


def build_model(cfg: DictConfig) -> ModelSpec:
    """Build the model block and reject it unless every regularity check passes."""
    block: Any = OmegaConf.to_container(cfg.model, resolve=True)
    try:
        spec = ModelSpec.from_dict(block)
    except ValueError as err:
        msg = f"model: {err}"
        raise ConfigError(msg) from err

    report = validate(spec)
    if not report.valid:
        details = "; ".join(v.detail for v in report.violations)
        msg = f"model fails validation: {details}"
        raise ConfigError(msg)

    return spec


def _comment(cfg: DictConfig) -> str:
    return f"config_hash={config_hash(cfg)} seed={cfg[cfg.command].seed}"


def _grid(spec: ModelSpec, variant: str, n_steps: int) -> TimeGrid:
    # Short-time systems live on [0, 1]
    horizon = 1.0 if variant == Variants.SHORT_TIME else spec.horizon
    return TimeGrid(horizon, n_steps)


def _control(grid: TimeGrid, values: Sequence[float]) -> ControlPath:
    phi = np.full(grid.n_steps, values[0]) if len(values) == 1 else np.asarray(values)
    return ControlPath(grid, phi)


def _path_rows(path: DeterministicPath) -> Iterator[tuple[float, float, float]]:
    yield from zip(path.grid.nodes, path.x, path.k, strict=True)


def cmd_simulate(cfg: DictConfig, out: Path, workers: int = 1) -> None:
    """Simulate the particle system; writes paths.csv, kpath.csv and summary.json."""
    block = cfg.simulate
    spec = build_model(cfg)
    grid = _grid(spec, block.variant, block.n_steps)
    args = (spec, grid, block.n_particles, block.epsilon, block.seed)
    kwargs = {
        "keep_paths": block.paths_written > 0,
        "path_limit": block.paths_written,
        "tol": block.tol,
        "workers": workers,
    }

    match block.variant:
        case Variants.SMALL_NOISE:
            ensemble = simulate(*args, **kwargs)
        case Variants.CONTROLLED:
            # K^eps of the uncontrolled system at the same eps, seed and grid
            uncontrolled = simulate(
                *args,
                keep_paths=False,
                tol=block.tol,
                workers=workers,
            )
            k_frozen = uncontrolled.k_path
            phi = _control(grid, block.phi)
            ensemble = simulate_controlled(*args, phi, k_frozen, **kwargs)
        case Variants.SHORT_TIME:
            ensemble = simulate_short_time(*args, **kwargs)
        case _:
            msg = f"simulate.variant: unknown variant {block.variant}"
            raise ConfigError(msg)

    comment = _comment(cfg)
    nodes = grid.nodes
    if ensemble.u is not None:
        u = ensemble.u
        rows = (
            (nodes[k], i, u[i, k], u[i, k] + ensemble.k_path[k])
            for i in range(u.shape[0])
            for k in range(grid.n_steps + 1)
        )
        write_csv(out / "paths.csv", ("t", "particle", "u", "x"), rows, comment)
    k_rows = zip(nodes, ensemble.k_path, strict=True)
    write_csv(out / "kpath.csv", ("t", "k"), k_rows, comment)

    summary = ensemble.summary()
    if block.k_reference is not None:
        error = abs(float(ensemble.k_path[-1]) - block.k_reference)
        summary["k_reference_error"] = error
        summary["k_reference_ok"] = error <= block.k_tolerance
        if error > block.k_tolerance:
            logger.warning(
                "|K_T - %s| = %s exceeds %s",
                block.k_reference,
                error,
                block.k_tolerance,
            )
    summary["config_hash"] = config_hash(cfg)
    write_json(out / "summary.json", summary)


def cmd_skeleton(cfg: DictConfig, out: Path, workers: int = 1) -> None:  # noqa: ARG001
    """Solve the skeleton for a control; writes path.csv, limit.csv and summary.json."""
    block = cfg.skeleton
    spec = build_model(cfg)
    grid = _grid(spec, block.variant, block.n_steps)
    phi = _control(grid, block.phi)

    if block.variant == Variants.SMALL_NOISE:
        limit = solve_mr_ode(spec, grid)
        path = solve_skeleton(spec, grid, phi, limit.k)
    else:
        limit = solve_short_mr_ode(spec, grid)
        path = solve_short_skeleton(spec, grid, phi)

    comment = _comment(cfg)
    write_csv(out / "path.csv", ("t", "x", "k"), _path_rows(path), comment)
    write_csv(out / "limit.csv", ("t", "x", "k"), _path_rows(limit), comment)

    summary: dict[str, Any] = {
        "energy": phi.energy,
        "x_terminal": float(path.x[-1]),
        "constraint_floor": path.constraint_floor(spec.h),
        "flatness_residual": path.flatness_residual(spec.h),
        "config_hash": config_hash(cfg),
    }
    if spec.nondegenerate:
        if block.variant == Variants.SMALL_NOISE:
            summary["path_rate"] = path_rate(spec, path, limit.k).value
        else:
            summary["path_rate"] = short_path_rate(spec, path).value
    write_json(out / "summary.json", summary)


def cmd_rate(cfg: DictConfig, out: Path, workers: int = 1) -> None:  # noqa: ARG001
    """Endpoint rates for each target; writes rate.csv."""
    block = cfg.rate
    spec = build_model(cfg)
    grid = _grid(spec, block.mode, block.n_steps)

    rows = []
    for target in block.targets:
        result = endpoint_rate(
            spec,
            target,
            block.mode,
            grid,
            bound=block.bound,
            max_outer=block.max_outer,
            max_inner=block.max_inner,
        )
        rows.append((target, result.value, result.iterations, result.grad_norm))

    header = ("target", "rate", "iterations", "grad_norm")
    write_csv(out / "rate.csv", header, rows, _comment(cfg))


def _kernel_rows(
    d: npt.NDArray[np.float64],
    nodes: npt.NDArray[np.float64],
) -> Iterator[tuple[Any, ...]]:
    for j in range(d.shape[0]):
        for k in range(j, d.shape[1]):
            yield nodes[j], nodes[k], d[j, k]


def cmd_malliavin(cfg: DictConfig, out: Path, workers: int = 1) -> None:
    """Malliavin kernel, density and tangent diagnostics with their CSVs."""
    block = cfg.malliavin
    spec = build_model(cfg)
    grid = TimeGrid(spec.horizon, block.n_steps)

    # Stream 0 estimates the frozen K, streams 1.. drive the single paths
    ensemble = simulate(
        spec,
        grid,
        block.k_particles,
        block.epsilon,
        block.seed,
        keep_paths=False,
        workers=workers,
    )
    bundles = [
        tangent_simulate(
            spec,
            grid,
            block.seed,
            k_path=ensemble.k_path,
            epsilon=block.epsilon,
            stream=1 + index,
        )
        for index in range(block.n_bundles)
    ]
    kernels = [kernel_product(bundle) for bundle in bundles]
    bundle, kernel = bundles[0], kernels[0]
    density = density_estimate(ensemble.x_final, block.bandwidth)
    direction = ControlPath.constant(grid, block.direction)
    report = cameron_martin_check(spec, bundle, direction, block.bump)

    comment = _comment(cfg)
    nodes = grid.nodes
    kernel_rows = _kernel_rows(kernel.d, nodes)
    write_csv(out / "kernel.csv", ("r", "t", "d"), kernel_rows, comment)
    density_rows = zip(density.x, density.f, strict=True)
    write_csv(out / "density.csv", ("x", "f"), density_rows, comment)
    write_csv(
        out / "tangent.csv",
        ("t", "x", "y", "z"),
        zip(nodes, bundle.x, bundle.y, bundle.z, strict=True),
        comment,
    )

    direct = kernel_direct(spec, bundle, 0)
    picard_errors = picard_iterates(spec, bundle, block.picard_iterations)
    summary = {
        "inverse_defect": bundle.inverse_defect(),
        "product_vs_direct": float(np.max(np.abs(direct - kernel.row(0)))),
        "malliavin_covariance": malliavin_covariance(kernel, grid.n_steps),
        "fd_derivative": report.fd_derivative,
        "kernel_pairing": report.kernel_pairing,
        "cameron_martin_error": report.abs_error,
        "picard_errors": picard_errors.tolist(),
        "kernel_moment": kernel_moment(kernels, block.moment_p),
        "density_mass": density.mass(),
        "k_terminal": float(ensemble.k_path[-1]),
        "config_hash": config_hash(cfg),
    }
    write_json(out / "summary.json", summary)


def cmd_ldp(cfg: DictConfig, out: Path, workers: int = 1) -> None:
    """Rare-event probabilities over the epsilon schedule; writes ldp.csv."""
    block = cfg.ldp
    plan = ExperimentPlan(
        model=build_model(cfg),
        variant=block.variant,
        epsilons=tuple(block.epsilons),
        event=Event(block.event.kind, block.event.threshold),
        n_particles=block.n_particles,
        n_steps=block.n_steps,
        n_mc_batches=block.n_mc_batches,
        seed=block.seed,
        statistic=block.statistic,
        workers=workers,
    )
    report = run_ldp_experiment(plan)

    write_csv(
        out / "ldp.csv",
        ("epsilon", "p_hat", "std_err", "neg_eps_log_p", "reference_rate"),
        report.table(),
        _comment(cfg),
    )
    summary = {
        "event": str(plan.event),
        "statistic": report.statistic,
        "reference_rate": report.reference_rate,
        "reference_label": report.reference_label,
        "pilot_probability": report.pilot_probability,
        "pilot_ok": report.pilot_ok,
        "trend_nonincreasing": report.trend_nonincreasing(),
        "hits": [row.hits for row in report.rows],
        "zero_hits": [row.zero_hits for row in report.rows],
        "neg_eps_log_p_se": [row.neg_eps_log_p_se for row in report.rows],
        "config_hash": config_hash(cfg),
    }
    write_json(out / "summary.json", summary)


def cmd_converge(cfg: DictConfig, out: Path, workers: int = 1) -> None:
    """Scheme and epsilon -> 0 studies; writes converge.csv, eps.csv, summary.json."""
    block = cfg.converge
    spec = build_model(cfg)
    if not is_closed_form(spec):
        msg = "converge needs the closed-form model: b = -1, sigma = 1, xi = 0, h = z"
        raise ConfigError(msg)

    study = run_convergence_study(
        spec,
        block.dts,
        block.n_particles,
        block.seed,
        n_replicates=block.n_replicates,
        workers=workers,
    )
    eps_study = run_eps_limit_study(
        spec,
        block.epsilons,
        block.eps_n_particles,
        block.eps_n_steps,
        block.seed,
        workers=workers,
    )

    comment = _comment(cfg)
    write_csv(
        out / "converge.csv",
        ("dt", "n_particles", "k_error", "x_error"),
        study.table(),
        comment,
    )
    write_csv(
        out / "eps.csv",
        (
            "epsilon",
            "mean_sq_sup_x_dev",
            "std_err",
            "sup_k_dev",
            "w1_bound",
            "sup_x_second_moment",
        ),
        eps_study.table(),
        comment,
    )
    summary = {
        "n_slope": study.n_slope,
        "dt_slope": study.dt_slope,
        "eps_decreasing": eps_study.decreasing(),
        "config_hash": config_hash(cfg),
    }
    write_json(out / "summary.json", summary)


def build_parser() -> argparse.ArgumentParser:
    """Parser with one subcommand per experiment and the shared run options."""
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", "-c", help="JSON config file", type=Path)
    shared.add_argument("--out", "-o", help="Output dir", type=Path, default=Path())
    shared.add_argument("--workers", "-w", help="Worker threads", type=int, default=1)
    shared.add_argument("--seed", "-s", help="Overrides the config seed", type=int)
    shared.add_argument("--model", "-m", help="Model preset", type=str)
    shared.add_argument(
        "--log-level",
        help="Logging level",
        choices=LEVELS,
        default="INFO",
    )

    parser = argparse.ArgumentParser(prog="mrsde", description=__doc__)
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        subparsers.add_parser(command, parents=[shared])

    return parser


def run(argv: Sequence[str] | None = None) -> int:
    """Parse arguments, run one subcommand and map failures to exit codes."""
    args = build_parser().parse_args(argv)
    set_level(args.log_level)

    try:
        if args.workers < 1:
            msg = f"--workers must be >= 1, got {args.workers}"
            raise ConfigError(msg)
        cfg = load_config(args.command, args.config, preset=args.model, seed=args.seed)

        match args.command:
            case "simulate":
                cmd_simulate(cfg, args.out, args.workers)
            case "skeleton":
                cmd_skeleton(cfg, args.out, args.workers)
            case "rate":
                cmd_rate(cfg, args.out, args.workers)
            case "malliavin":
                cmd_malliavin(cfg, args.out, args.workers)
            case "ldp":
                cmd_ldp(cfg, args.out, args.workers)
            case "converge":
                cmd_converge(cfg, args.out, args.workers)

    except NUMERICAL_ERRORS as err:
        logger.error("Numerical abort: %s", err)  # noqa: TRY400
        return ExitCodes.NUMERICAL_ABORT
    except ValueError as err:
        logger.error("Config error: %s", err)  # noqa: TRY400
        return ExitCodes.CONFIG_ERROR

    return ExitCodes.SUCCESS


def main() -> None:
    """Entry point for the `mrsde` console script."""
    sys.exit(run())


if __name__ == "__main__":
    main()
