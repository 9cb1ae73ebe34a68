"""Compose run configs from the YAML defaults, a model preset and a JSON file."""

import hashlib
import json
import math
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any

from hydra import compose, initialize_config_module
from hydra.errors import HydraException
from omegaconf import DictConfig, OmegaConf
from omegaconf.errors import OmegaConfBaseException

from mrsde.common.constants import EventKinds, EventStatistics, RateModes, Variants
from mrsde.common.exceptions import ConfigError
from mrsde.common.logger import get_logger
from mrsde.config.schema import RunConfig
from mrsde.harness.statistics import MIN_BATCHES

logger = get_logger(__name__)

COMMANDS = ("simulate", "skeleton", "rate", "malliavin", "ldp", "converge")
MAX_SEED = 2**64
HASH_DIGITS = 16
LIMIT_VARIANTS = (str(Variants.SMALL_NOISE), str(Variants.SHORT_TIME))


def _read_json(path: Path) -> dict[str, Any]:
    try:
        text = path.read_text()
    except OSError as err:
        msg = f"Cannot read config {path}: {err}"
        raise ConfigError(msg) from err

    try:
        payload = json.loads(text)
    except json.JSONDecodeError as err:
        msg = f"{path}:{err.lineno}:{err.colno}: {err.msg}"
        raise ConfigError(msg) from err

    if not isinstance(payload, dict):
        msg = f"{path}: top level must be a JSON object"
        raise ConfigError(msg)

    return payload


def _decreasing(values: Sequence[float]) -> bool:
    pairs = zip(values[:-1], values[1:], strict=True)
    return all(later < earlier for earlier, later in pairs)


def _check_model(model: DictConfig) -> list[str]:
    problems = []
    if not (math.isfinite(model.xi) and math.isfinite(model.T) and model.T > 0.0):
        problems.append(
            f"model: need finite xi and T > 0, got xi={model.xi}, T={model.T}",
        )
    if model.sigma_floor < 0.0:
        problems.append(f"model.sigma_floor: must be >= 0, got {model.sigma_floor}")
    if model.state_radius <= 0.0:
        problems.append(f"model.state_radius: must be > 0, got {model.state_radius}")

    return problems


def _check_simulate(block: DictConfig) -> list[str]:
    problems = []
    if block.variant not in {str(v) for v in Variants}:
        problems.append(f"simulate.variant: unknown variant {block.variant}")
    if not 0.0 <= block.epsilon <= 1.0:
        problems.append(f"simulate.epsilon: must lie in [0, 1], got {block.epsilon}")
    if block.paths_written < 0:
        problems.append(
            f"simulate.paths_written: must be >= 0, got {block.paths_written}",
        )
    if len(block.phi) not in (1, block.n_steps):
        problems.append(
            f"simulate.phi: need 1 or {block.n_steps} values, got {len(block.phi)}",
        )
    if block.tol <= 0.0:
        problems.append(f"simulate.tol: must be > 0, got {block.tol}")
    if (block.k_reference is None) != (block.k_tolerance is None):
        problems.append("simulate.k_reference and simulate.k_tolerance go together")
    if block.k_tolerance is not None and block.k_tolerance <= 0.0:
        problems.append(f"simulate.k_tolerance: must be > 0, got {block.k_tolerance}")

    return problems


def _check_skeleton(block: DictConfig) -> list[str]:
    problems = []
    if block.variant not in LIMIT_VARIANTS:
        problems.append(
            f"skeleton.variant: must be one of {LIMIT_VARIANTS}, got {block.variant}",
        )
    if len(block.phi) not in (1, block.n_steps):
        problems.append(
            f"skeleton.phi: need 1 or {block.n_steps} values, got {len(block.phi)}",
        )

    return problems


def _check_rate(block: DictConfig) -> list[str]:
    problems = []
    if block.mode not in {str(m) for m in RateModes}:
        problems.append(f"rate.mode: unknown mode {block.mode}")
    if not block.targets or not all(math.isfinite(a) for a in block.targets):
        problems.append(f"rate.targets: need finite values, got {list(block.targets)}")
    if block.bound is not None and block.bound <= 0.0:
        problems.append(f"rate.bound: must be > 0, got {block.bound}")
    if block.max_outer < 1 or block.max_inner < 1:
        problems.append("rate.max_outer and rate.max_inner: must be >= 1")

    return problems


def _check_malliavin(block: DictConfig) -> list[str]:
    problems = []
    if not 0.0 <= block.epsilon <= 1.0:
        problems.append(f"malliavin.epsilon: must lie in [0, 1], got {block.epsilon}")
    if block.k_particles < 1:
        problems.append(f"malliavin.k_particles: must be >= 1, got {block.k_particles}")
    if block.bump <= 0.0:
        problems.append(f"malliavin.bump: must be > 0, got {block.bump}")
    if block.bandwidth <= 0.0:
        problems.append(f"malliavin.bandwidth: must be > 0, got {block.bandwidth}")
    if block.picard_iterations < 0:
        problems.append(
            f"malliavin.picard_iterations: must be >= 0, got {block.picard_iterations}",
        )
    if block.n_bundles < 1:
        problems.append(f"malliavin.n_bundles: must be >= 1, got {block.n_bundles}")
    if block.moment_p <= 0.0:
        problems.append(f"malliavin.moment_p: must be > 0, got {block.moment_p}")

    return problems


def _check_ldp(block: DictConfig) -> list[str]:
    problems = []
    eps = list(block.epsilons)
    if block.variant not in LIMIT_VARIANTS:
        problems.append(
            f"ldp.variant: must be one of {LIMIT_VARIANTS}, got {block.variant}",
        )
    if not eps or not all(0.0 < e <= 1.0 for e in eps) or not _decreasing(eps):
        problems.append(
            f"ldp.epsilons: need strictly decreasing values in (0, 1], got {eps}",
        )
    if block.event.kind not in {str(k) for k in EventKinds}:
        problems.append(f"ldp.event.kind: unknown event {block.event.kind}")
    if not math.isfinite(block.event.threshold):
        problems.append(
            f"ldp.event.threshold: must be finite, got {block.event.threshold}",
        )
    elif block.event.kind == EventKinds.SUP_DEVIATION and block.event.threshold <= 0.0:
        problems.append(
            f"ldp.event.threshold: radius must be > 0, got {block.event.threshold}",
        )
    if block.statistic not in {str(s) for s in EventStatistics}:
        problems.append(f"ldp.statistic: unknown statistic {block.statistic}")
    if block.n_mc_batches < MIN_BATCHES:
        problems.append(
            f"ldp.n_mc_batches: must be >= {MIN_BATCHES}, got {block.n_mc_batches}",
        )

    return problems


def _check_converge(block: DictConfig) -> list[str]:
    problems = []
    if not block.dts or not all(dt > 0.0 for dt in block.dts):
        problems.append(f"converge.dts: need positive steps, got {list(block.dts)}")
    if not block.n_particles or not all(n >= 1 for n in block.n_particles):
        problems.append(
            f"converge.n_particles: need values >= 1, got {list(block.n_particles)}",
        )
    if block.n_replicates < 1:
        problems.append(
            f"converge.n_replicates: must be >= 1, got {block.n_replicates}",
        )
    if not block.epsilons or not all(0.0 <= e <= 1.0 for e in block.epsilons):
        problems.append(
            f"converge.epsilons: need values in [0, 1], got {list(block.epsilons)}",
        )
    if block.eps_n_particles < MIN_BATCHES:
        problems.append(
            f"converge.eps_n_particles: must be >= {MIN_BATCHES}, "
            f"got {block.eps_n_particles}",
        )
    if block.eps_n_steps < 1:
        problems.append(f"converge.eps_n_steps: must be >= 1, got {block.eps_n_steps}")

    return problems


CHECKS: dict[str, Callable[[DictConfig], list[str]]] = {
    "simulate": _check_simulate,
    "skeleton": _check_skeleton,
    "rate": _check_rate,
    "malliavin": _check_malliavin,
    "ldp": _check_ldp,
    "converge": _check_converge,
}


def check_ranges(cfg: DictConfig) -> list[str]:
    """Range violations of the model block and the active command block."""
    block = cfg[cfg.command]
    problems = _check_model(cfg.model)
    for key in ("n_steps", "n_particles"):
        if key in block and isinstance(block[key], int) and block[key] < 1:
            problems.append(f"{cfg.command}.{key}: must be >= 1, got {block[key]}")
    if not 0 <= block.seed < MAX_SEED:
        problems.append(f"{cfg.command}.seed: must lie in [0, 2^64), got {block.seed}")

    return problems + CHECKS[cfg.command](block)


def load_config(
    command: str,
    path: Path | None = None,
    *,
    preset: str | None = None,
    seed: int | None = None,
) -> DictConfig:
    """Resolve the config of one subcommand.

    Notes:
    -----
    Precedence, lowest first: structured schema, YAML defaults, model
    preset, JSON file, seed override.

    Args:
    ----
        command: subcommand name
        path: JSON config file
        preset: name of a model preset under `config/model`
        seed: overrides the command block's seed

    Returns:
    -------
        validated config

    """
    if command not in COMMANDS:
        msg = f"Unknown command {command}, expected one of {COMMANDS}"
        raise ConfigError(msg)

    user = {} if path is None else _read_json(path)
    overrides = [f"command={command}"]
    if preset is not None:
        overrides.append(f"model={preset}")

    try:
        with initialize_config_module(config_module="mrsde.config", version_base=None):
            composed = compose(config_name="config", overrides=overrides)
    except HydraException as err:
        msg = f"Cannot compose defaults: {err}"
        raise ConfigError(msg) from err

    try:
        cfg = OmegaConf.merge(OmegaConf.structured(RunConfig), composed, user)
        cfg.command = command
        if seed is not None:
            cfg[command].seed = seed
    except OmegaConfBaseException as err:
        source = "config" if path is None else str(path)
        msg = f"{source}: {err}"
        raise ConfigError(msg) from err

    relevant = ("model.", f"{command}.")
    missing = sorted(
        key for key in OmegaConf.missing_keys(cfg) if key.startswith(relevant)
    )
    if missing:
        msg = f"Missing mandatory values: {', '.join(missing)}"
        raise ConfigError(msg)

    problems = check_ranges(cfg)
    if problems:
        msg = "Invalid config:\n  " + "\n  ".join(problems)
        raise ConfigError(msg)

    logger.info("Loaded %s config, hash %s", command, config_hash(cfg))
    return cfg


def resolved_block(cfg: DictConfig) -> dict[str, Any]:
    """The model and active command block as plain containers."""
    return {
        "command": cfg.command,
        "model": OmegaConf.to_container(cfg.model, resolve=True),
        cfg.command: OmegaConf.to_container(cfg[cfg.command], resolve=True),
    }


def config_hash(cfg: DictConfig) -> str:
    """First 16 hex digits of SHA-256 over the canonical JSON of the resolved config."""
    canonical = json.dumps(resolved_block(cfg), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()[:HASH_DIGITS]
